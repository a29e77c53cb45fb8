"""Neural quantum states with autoregressive RetNet, transformer and MADE ansatzes."""

from ._core import (
    Ansatz,
    AnsatzConfig,
    ConfigError,
    DimensionError,
    MolecularIntegrals,
    NumericalError,
    ParseError,
    QubitHamiltonian,
    UsageError,
    cli,
    config_from_string,
    config_to_string,
    crossover_seq_len,
    exact_energy,
    flops_per_token,
    ground_state_energy,
    local_energies,
    param_count,
    parse_fcidump,
    train,
)

__all__ = [
    "Ansatz",
    "AnsatzConfig",
    "ConfigError",
    "DimensionError",
    "MolecularIntegrals",
    "NumericalError",
    "ParseError",
    "QubitHamiltonian",
    "UsageError",
    "cli",
    "config_from_string",
    "config_to_string",
    "crossover_seq_len",
    "exact_energy",
    "flops_per_token",
    "ground_state_energy",
    "local_energies",
    "param_count",
    "parse_fcidump",
    "train",
]
