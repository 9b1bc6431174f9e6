from .krylov import arnoldi, lanczos
from .metrics import eigen_residuals, rmse_eigenvalues, rmse_eigenvectors
from .oracle import jacobi_eigh, oracle_eig, oracle_top_eigs, power_deflation
from .pipeline import plaintext_pipeline
from .qr import qr_givens, random_hessenberg

__all__ = [
    "arnoldi",
    "eigen_residuals",
    "jacobi_eigh",
    "lanczos",
    "oracle_eig",
    "oracle_top_eigs",
    "plaintext_pipeline",
    "power_deflation",
    "qr_givens",
    "random_hessenberg",
    "rmse_eigenvalues",
    "rmse_eigenvectors",
]
