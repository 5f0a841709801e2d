import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from embound.linalg import (
    IndefiniteError,
    SymmetryError,
    amg_apply,
    amg_setup,
    as_sparse_sym,
    cg_solve,
    extremal_eigs,
    minres_solve,
)


def lap1d(n):
    return sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


def lap2d(n):
    T = lap1d(n)
    I = sp.identity(n, format="csr")
    return (sp.kron(T, I) + sp.kron(I, T)).tocsr()


def test_cg_diagonal():
    res = cg_solve(sp.diags([2.0, 3.0]).tocsr(), np.array([2.0, 3.0]))
    assert np.allclose(res.x, 1) and res.iterations <= 2


def test_cg_1d_poisson_against_dense():
    n = 100
    h = 1 / (n + 1)
    x = h * np.arange(1, n + 1)
    A = lap1d(n)
    b = h**2 * np.pi**2 * np.sin(np.pi * x)
    res = cg_solve(A, b, tol=1e-12, maxiter=500)
    assert np.allclose(res.x, np.linalg.solve(A.toarray(), b), atol=1e-10)


def test_cg_detects_indefinite():
    with pytest.raises(IndefiniteError):
        cg_solve(sp.diags([1.0, -1.0]).tocsr(), np.array([1.0, 1.0]))


def test_minres_indefinite_diagonal():
    res = minres_solve(sp.diags([1.0, -1.0]).tocsr(), np.array([1.0, 1.0]))
    assert np.allclose(res.x, [1.0, -1.0])


def test_minres_shifted_laplacian():
    n = 40
    A = (lap1d(n) - 0.5 * sp.identity(n)).tocsr()
    b = np.linspace(-1, 1, n)
    res = minres_solve(A, b, tol=1e-12, maxiter=400)
    assert np.allclose(res.x, np.linalg.solve(A.toarray(), b), atol=1e-9)


def test_zero_rhs():
    assert cg_solve(lap1d(5), np.zeros(5)).iterations == 0


def test_as_sparse_sym_rejects_nonsymmetric():
    with pytest.raises(SymmetryError):
        as_sparse_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_amg_small_system_single_level():
    A = lap1d(5)
    hier = amg_setup(A)
    assert hier.n_levels == 1
    r = np.arange(5.0)
    assert np.allclose(amg_apply(hier, r), np.linalg.solve(A.toarray(), r))


def test_amg_accelerates_cg():
    A = lap2d(63)
    b = np.ones(A.shape[0])
    plain = cg_solve(A, b, tol=1e-10, maxiter=2000)
    pre = cg_solve(A, b, tol=1e-10, precond=amg_setup(A, "V"))
    assert pre.iterations * 5 <= plain.iterations


@pytest.mark.parametrize("cycle", ["V", "W"])
def test_amg_preconditioner_symmetric(cycle, rng):
    A = lap2d(40)
    hier = amg_setup(A, cycle)
    z1, z2 = rng.standard_normal((2, A.shape[0]))
    a, b = z1 @ amg_apply(hier, z2), z2 @ amg_apply(hier, z1)
    assert abs(a - b) < 1e-10 * np.linalg.norm(z1) * np.linalg.norm(z2)


def test_amg_galerkin():
    hier = amg_setup(lap2d(40))
    assert hier.n_levels > 1 and hier.galerkin_error() < 1e-12


def test_amg_energy_error_decreases(rng):
    A = lap2d(40)
    hier = amg_setup(A, "V")
    x_true = rng.standard_normal(A.shape[0])
    b = A @ x_true
    x = np.zeros_like(b)
    prev = np.inf
    for _ in range(6):
        x = x + amg_apply(hier, b - A @ x)
        e = x_true - x
        en = np.sqrt(e @ (A @ e))
        assert en < prev
        prev = en


def test_amg_rejects_bad_cycle():
    with pytest.raises(ValueError):
        amg_setup(lap1d(5), "F")


def test_eigs_diagonal():
    A = sp.diags([1.0, 2.0, 3.0]).tocsr()
    assert extremal_eigs(A, "max") == pytest.approx(3.0)
    assert extremal_eigs(A, "min") == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["lanczos", "power"])
def test_eigs_1d_laplacian(method):
    n = 30
    k = np.arange(1, n + 1)
    exact = 2 - 2 * np.cos(k * np.pi / (n + 1))
    A = lap1d(n)
    tol = 1e-8
    assert extremal_eigs(A, "max", method=method, tol=1e-12) == pytest.approx(exact.max(), abs=tol)
    assert extremal_eigs(A, "min", method=method, tol=1e-12) == pytest.approx(exact.min(), abs=tol)


def test_eigs_agree_with_arpack_reference():
    A = lap2d(20)
    ref = spla.eigsh(A, k=1, which="LA", return_eigenvectors=False)[0]
    assert extremal_eigs(A, "max") == pytest.approx(ref, rel=1e-9)
