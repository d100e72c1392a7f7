"""Python access to the convid deconvolution toolkit."""

from ._convid import (
    ConfigError,
    IoError,
    NumericalError,
    check_tail_class,
    config_hash,
    ecf,
    estimate,
    illposed_demo,
    simulate,
    solve_oracle,
)

__all__ = [
    "ConfigError",
    "IoError",
    "NumericalError",
    "check_tail_class",
    "config_hash",
    "ecf",
    "estimate",
    "illposed_demo",
    "simulate",
    "solve_oracle",
]
