"""Exact verification of Steinberg-group constructions over small rings."""

from .errors import SteinlabError
from .harness import DEFAULT_CONFIG, load_config, run_suite
from .report import RunReport, VerificationReport, emit_report

__version__ = "0.1.0"

__all__ = ["DEFAULT_CONFIG", "RunReport", "SteinlabError", "VerificationReport",
           "emit_report", "load_config", "run_suite"]
