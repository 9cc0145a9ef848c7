"""BLAS thread-count override, applied before numpy is first imported."""

import os

_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
         "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS")


def apply_thread_env():
    """Propagate PSFRONT_THREADS to the BLAS runtime variables.

    Only takes effect for variables the user has not set themselves, and only
    if numpy has not been imported yet in this process.
    """
    n = os.environ.get("PSFRONT_THREADS")
    if not n:
        return
    for var in _VARS:
        os.environ.setdefault(var, n)
