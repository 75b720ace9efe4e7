"""Monte Carlo engine, sweeps, figure recipes and result I/O."""

from .montecarlo import McEstimate, ergodic_secrecy_rate_mc, run_trials, trial_secrecy_rate
from .sweep import SweepResult, SweepRow, SweepSpec, recipe, run_many, run_sweep
from .io import emit_csv, read_csv, csv_text, emit_json, load_spec_file, parse_spec_text

__all__ = [
    "McEstimate", "ergodic_secrecy_rate_mc", "run_trials", "trial_secrecy_rate",
    "SweepResult", "SweepRow", "SweepSpec", "recipe", "run_many", "run_sweep",
    "emit_csv", "read_csv", "csv_text", "emit_json", "load_spec_file", "parse_spec_text",
]
