from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class SymmetryError(ValueError):
    pass


def as_sparse_sym(A, check=True, tol=0.0) -> sp.csr_matrix:
    """CSR copy with sorted indices and no explicit zeros; optionally verify symmetry."""
    M = sp.csr_matrix(A, dtype=float, copy=True)
    M.sum_duplicates()
    M.eliminate_zeros()
    M.sort_indices()
    if M.shape[0] != M.shape[1]:
        raise SymmetryError("matrix is not square")
    if check:
        diff = abs(M - M.T)
        err = diff.max() if diff.nnz else 0.0
        if err > tol * max(abs(M).max(), 1.0):
            raise SymmetryError(f"matrix is not symmetric (max |A - A^T| = {err:.3e})")
    return M
