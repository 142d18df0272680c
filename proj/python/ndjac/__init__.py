"""Python access to the ndjac verification library."""

from ._ndjac import (
    Error,
    __version__,
    factor_log,
    hausdorff_density_psd,
    mv_gamma_log,
    sample_stiefel,
    sdet,
    stiefel_volume_log,
    tau,
    verify,
    verify_all,
)

__all__ = [
    "Error",
    "__version__",
    "factor_log",
    "hausdorff_density_psd",
    "mv_gamma_log",
    "sample_stiefel",
    "sdet",
    "stiefel_volume_log",
    "tau",
    "verify",
    "verify_all",
]
