"""Parallel multi-dimensional DFT algorithms over a simulated processor grid.

The heavy lifting lives in the compiled ``_core`` module: sequential DFT
kernels, the tensor-distribution algebra, five distributed transform
algorithms running on an in-process multi-rank simulator, and the alpha-beta
communication cost model with its grid table and advisor.
"""

from gridfft._core import (
    Error,
    advise,
    batch_dft_mode,
    cost_bkt,
    cost_mst,
    ct_step,
    dft_naive,
    estimate_algorithm,
    expected_collectives,
    fft,
    grid_configs,
    grid_configs_csv,
    idft_naive,
    latency_threshold,
    local_shape,
    max_procs,
    owner_of,
    parse_dist,
    reference_dft_nd,
    run_dft,
    twiddle,
    verify,
)

__all__ = [
    "Error",
    "advise",
    "batch_dft_mode",
    "cost_bkt",
    "cost_mst",
    "ct_step",
    "dft_naive",
    "estimate_algorithm",
    "expected_collectives",
    "fft",
    "grid_configs",
    "grid_configs_csv",
    "idft_naive",
    "latency_threshold",
    "local_shape",
    "max_procs",
    "owner_of",
    "parse_dist",
    "reference_dft_nd",
    "run_dft",
    "twiddle",
    "verify",
]

__version__ = "0.1.0"
