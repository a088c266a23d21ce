"""Bandwidth-kernel autotuning toolkit: config enumeration, kernel
generation, simulated sweeps and copy-threshold pruning."""

try:
    from bwtune._core import (  # type: ignore[attr-defined]
        builtin_profiles,
        bytes_moved,
        enumerate_configs,
        kernel_source,
        load_store,
        prune_by_copy_threshold,
        sweep_sim,
    )
except ImportError:  # in-tree builds put _core next to the build artifacts
    from _core import (  # type: ignore[no-redef]
        builtin_profiles,
        bytes_moved,
        enumerate_configs,
        kernel_source,
        load_store,
        prune_by_copy_threshold,
        sweep_sim,
    )

__all__ = [
    "builtin_profiles",
    "bytes_moved",
    "enumerate_configs",
    "kernel_source",
    "load_store",
    "prune_by_copy_threshold",
    "sweep_sim",
]
