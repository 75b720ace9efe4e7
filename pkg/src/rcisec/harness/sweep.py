"""
Parameter sweeps over one axis, mixing Monte Carlo estimates with their
large-system counterparts, plus the figure recipes.

Row semantics by axis
---------------------
``M``       K follows the fixed load: ``K = round(beta * M)``.
``rho_dB``  SNR in dB. With ``fdd_b`` set, ``tau2 = C/rho`` follows the
            feedback scaling law. With ``tdd_T`` set, each row instead
            reports the optimal training fraction (see ``_training_row``).
``tau``     CSIT error standard deviation; ``tau2 = tau**2``.
``T_t``     Training length; ``tau2 = 1/(1 + T_t*rho/c)`` and both the Monte
            Carlo and large-system rates carry the ``(T - T_t)/T`` prelog.
``B_bits``  RVQ feedback bits; ``tau2`` is set to the distortion bound
            ``2**(-B/(M-1))``.

The regularizer is the perfect-CSIT optimum at each row's (beta, rho).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace

from .. import __version__
from ..asymptotics import large_system_point, secrecy_rate_deq_perfect
from ..channel import SystemConfig
from ..errors import RcisecError, ValidationError
from ..fdd import rate_gap, regime_for, rvq_distortion_bound, scaling_constant
from ..precoder import optimal_regularizer
from ..tdd import TddConfig, optimal_training_grid
from .montecarlo import ergodic_secrecy_rate_mc

__all__ = [
    "AXES",
    "OUTPUTS",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "run_many",
    "recipe",
    "RECIPES",
]

AXES = ("M", "rho_dB", "T_t", "B_bits", "tau")
OUTPUTS = ("mc_rate", "deq_rate", "deq_perfect", "gap", "sinr_means")
NORMALIZE = ("none", "M", "K")

NAN = math.nan


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple
    fixed: SystemConfig
    trials: int = 1000
    master_seed: int = 0
    outputs: frozenset = frozenset({"mc_rate", "deq_rate"})
    normalize: str = "none"
    label: str = ""
    fdd_b: float | None = None
    tdd_T: int | None = None
    tdd_c: float | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValidationError(f"unknown axis {self.axis!r}; expected one of {AXES}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValidationError("sweep values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}")
        outputs = frozenset(self.outputs)
        unknown = outputs - set(OUTPUTS)
        if unknown:
            raise ValidationError(f"unknown outputs {sorted(unknown)}; expected a subset of {OUTPUTS}")
        object.__setattr__(self, "outputs", outputs)
        if self.normalize not in NORMALIZE:
            raise ValidationError(f"normalize must be one of {NORMALIZE}, got {self.normalize!r}")
        if self.axis == "T_t" and (self.tdd_T is None or self.tdd_c is None):
            raise ValidationError("a T_t sweep needs tdd_T and tdd_c")
        if (self.tdd_T is None) != (self.tdd_c is None):
            raise ValidationError("tdd_T and tdd_c must be given together")
        if self.fdd_b is not None and not self.fdd_b >= 1:
            raise ValidationError(f"fdd_b must be >= 1, got {self.fdd_b!r}")

    def echo(self):
        d = asdict(self)
        d["values"] = list(self.values)
        d["outputs"] = sorted(self.outputs)
        d["fixed"] = {k: v for k, v in d["fixed"].items()}
        return d


@dataclass
class SweepRow:
    axis: str
    axis_value: float
    mc_mean: float = NAN
    mc_stderr: float = NAN
    ci95_low: float = NAN
    ci95_high: float = NAN
    deq_value: float = NAN
    deq_perfect: float = NAN
    extra: str = ""


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __add__(self, other):
        meta = {"parts": self.meta.get("parts", [self.meta]) + other.meta.get("parts", [other.meta])}
        return SweepResult(rows=self.rows + other.rows, meta=meta)


def _fmt(v):
    return format(v, ".17g") if isinstance(v, float) else str(v)


def _extra(pairs):
    return ";".join(f"{k}={_fmt(v)}" for k, v in pairs)


def _row_config(spec, v):
    """System configuration and prelog factor for one axis value."""
    cfg = spec.fixed
    prelog = 1.0
    if spec.axis == "M":
        M = int(round(v))
        K = max(1, int(round(cfg.beta * M)))
        cfg = cfg.replace(M=M, K=K)
    elif spec.axis == "rho_dB":
        cfg = cfg.replace(rho=10.0 ** (v / 10.0))
    elif spec.axis == "tau":
        cfg = cfg.replace(tau2=v * v)
    elif spec.axis == "T_t":
        if not 0 < v < spec.tdd_T:
            raise ValidationError(f"T_t={v} outside (0, {spec.tdd_T})")
        cfg = cfg.replace(tau2=1.0 / (1.0 + v * cfg.rho / spec.tdd_c))
        prelog = (spec.tdd_T - v) / spec.tdd_T
    elif spec.axis == "B_bits":
        cfg = cfg.replace(tau2=min(1.0, rvq_distortion_bound(cfg.M, v)))
    if spec.fdd_b is not None and spec.axis != "B_bits":
        C = scaling_constant(regime_for(cfg.beta), spec.fdd_b)
        cfg = cfg.replace(tau2=min(1.0, C / cfg.rho))
    return cfg, prelog


def _norm(spec, cfg):
    return {"none": 1.0, "M": float(cfg.M), "K": float(cfg.K)}[spec.normalize]


def _rate_row(spec, v, workers):
    cfg, prelog = _row_config(spec, v)
    row = SweepRow(axis=spec.axis, axis_value=v)
    scale = prelog / _norm(spec, cfg)
    extra = []
    if spec.label:
        extra.append(("series", spec.label))
    extra += [("M", cfg.M), ("K", cfg.K), ("tau2", cfg.tau2)]
    xi = optimal_regularizer(cfg.beta, cfg.rho)
    if spec.outputs & {"mc_rate", "sinr_means"}:
        est = ergodic_secrecy_rate_mc(cfg, spec.trials, spec.master_seed, xi=xi, workers=workers)
        if "mc_rate" in spec.outputs:
            lo, hi = est.ci95
            row.mc_mean = est.mean * scale
            row.mc_stderr = est.std_error * scale
            row.ci95_low, row.ci95_high = lo * scale, hi * scale
        if "sinr_means" in spec.outputs:
            extra += [("sinr_mc", est.sinr_intended_mean), ("sinr_eve_mc", est.sinr_eve_mean)]
    if spec.outputs & {"deq_rate", "sinr_means"} and cfg.tau2 < 1.0:
        point = large_system_point(cfg.beta, cfg.rho, cfg.tau2, xi)
        if "deq_rate" in spec.outputs:
            row.deq_value = point.sum_rate(cfg.K) * scale
        if "sinr_means" in spec.outputs:
            extra += [("sinr_deq", point.sinr_intended_deq), ("sinr_eve_deq", point.sinr_eve_deq)]
    if "deq_perfect" in spec.outputs:
        row.deq_perfect = cfg.K * secrecy_rate_deq_perfect(cfg.beta, cfg.rho) / _norm(spec, cfg)
    if "gap" in spec.outputs:
        extra.append(("gap", rate_gap(cfg.beta, cfg.rho, cfg.tau2, clamped=False)))
    row.extra = _extra(extra)
    return row


def _training_row(spec, v):
    """Optimal training for one SNR: ``deq_value`` is the cubic prediction of
    ``T_t/T``; the brute-force optimum is in ``extra``."""
    cfg = spec.fixed
    tcfg = TddConfig.from_db(T=spec.tdd_T, K=cfg.K, beta=cfg.beta, rho_db=v, c=spec.tdd_c)
    sol = optimal_training_grid(tcfg)
    T = spec.tdd_T
    row = SweepRow(axis=spec.axis, axis_value=v, deq_value=sol.t_opt_cubic / T)
    extra = [("series", spec.label)] if spec.label else []
    extra += [
        ("T", T), ("t_opt_grid", sol.t_opt_grid), ("grid_fraction", sol.t_opt_grid / T),
        ("t_opt_cubic", sol.t_opt_cubic), ("rate_at_grid_opt", sol.rate_at_grid_opt),
    ]
    row.extra = _extra(extra)
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every axis value in order. A row whose evaluation fails is
    kept with NaN cells and the error text in ``extra``."""
    start = time.perf_counter()
    rows = []
    for v in spec.values:
        try:
            if spec.tdd_T is not None and spec.axis == "rho_dB":
                rows.append(_training_row(spec, v))
            else:
                rows.append(_rate_row(spec, v, workers))
        except RcisecError as exc:
            rows.append(SweepRow(axis=spec.axis, axis_value=v,
                                 extra=_extra([("error", f"{type(exc).__name__}: {exc}")])))
    meta = {"spec": spec.echo(), "version": __version__,
            "wall_time": time.perf_counter() - start}
    return SweepResult(rows=rows, meta=meta)


def run_many(specs, workers: int = 1) -> SweepResult:
    result = None
    for s in specs:
        r = run_sweep(s, workers=workers)
        result = r if result is None else result + r
    return result


def recipe(name: str, trials: int | None = None, seed: int = 0):
    """Sweep specs that regenerate one of the reference figures.

    fig1  R_s/M against M for beta in {0.5, 1}, 20 dB, tau = 0.1. The M grid
          {8, 12, ..., 32} is a choice of this package.
    fig2  R_s/K against SNR for M = K = 10, perfect CSIT and tau2 = C/rho
          with a 1-bit target gap.
    fig3  optimal training fraction against SNR for M = K = 10, c = 10,
          T in {100, 200, 400}.
    """
    if name == "fig1":
        n = 2000 if trials is None else trials
        return [
            SweepSpec(axis="M", values=tuple(range(8, 33, 4)),
                      fixed=SystemConfig.from_db(M=8, K=int(8 * beta), rho_db=20.0, tau2=0.01),
                      trials=n, master_seed=seed, outputs=frozenset({"mc_rate", "deq_rate"}),
                      normalize="M", label=f"beta={beta:g}")
            for beta in (0.5, 1.0)
        ]
    if name == "fig2":
        n = 2000 if trials is None else trials
        base = dict(axis="rho_dB", values=tuple(float(x) for x in range(0, 41, 5)),
                    fixed=SystemConfig.from_db(M=10, K=10, rho_db=0.0), trials=n,
                    master_seed=seed, normalize="K")
        return [
            SweepSpec(**base, outputs=frozenset({"mc_rate", "deq_rate"}), label="perfect"),
            SweepSpec(**base, outputs=frozenset({"mc_rate", "deq_rate", "deq_perfect", "gap"}),
                      label="b=2", fdd_b=2.0),
        ]
    if name == "fig3":
        return [
            SweepSpec(axis="rho_dB", values=tuple(float(x) for x in range(10, 61, 5)),
                      fixed=SystemConfig.from_db(M=10, K=10, rho_db=0.0), trials=1,
                      master_seed=seed, outputs=frozenset({"deq_rate"}), label=f"T={T}",
                      tdd_T=T, tdd_c=10.0)
            for T in (100, 200, 400)
        ]
    raise ValidationError(f"unknown recipe {name!r}; expected one of {RECIPES}")


RECIPES = ("fig1", "fig2", "fig3")


def with_overrides(spec: SweepSpec, **kw) -> SweepSpec:
    return replace(spec, **{k: v for k, v in kw.items() if v is not None})
