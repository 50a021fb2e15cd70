"""Operator-algebra layer: oracles are dense brute-force linear algebra and
closed-form Fock-basis expressions (Poisson, geometric, Laguerre)."""

import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, gammaln

from phonlaser import hilbert as hb


def dense_destroy(n):
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)


def test_commutator_carries_truncation_tail():
    # [c, cdag] on an 8-level mode: identity except the last diagonal entry.
    dims = hb.ModeDims(1, 1, 8)
    c = hb.destroy(dims, "c")
    comm = (c @ c.dag() - c.dag() @ c).to_dense()
    # independent dense construction
    cd = dense_destroy(8)
    expected = cd @ cd.conj().T - cd.conj().T @ cd
    assert np.allclose(comm, expected, atol=1e-14)
    assert abs(comm[-1, -1] - (-(8 - 1))) < 1e-14
    assert np.allclose(np.diag(comm)[:-1], 1.0, atol=1e-14)


def test_create_is_structural_adjoint():
    dims = hb.ModeDims(2, 3, 4)
    for mode in hb.MODES:
        diff = hb.create(dims, mode).data - hb.destroy(dims, mode).dag().data
        assert diff.nnz == 0


def test_disjoint_mode_operators_commute():
    dims = hb.ModeDims(3, 4, 5)
    a = hb.destroy(dims, "a")
    b = hb.create(dims, "b")
    c = hb.number(dims, "c")
    for x, y in [(a, b), (a, c), (b, c)]:
        d = (x @ y - y @ x).data
        assert d.nnz == 0 or abs(d.data).max() < 1e-15


def test_number_operator_diagonal():
    dims = hb.ModeDims(2, 1, 3)
    n_c = hb.number(dims, "c").to_dense()
    assert np.allclose(np.diag(n_c), [0, 1, 2, 0, 1, 2])


def test_displacement_is_unitary():
    dims = hb.ModeDims(1, 1, 30)
    d = hb.displacement(dims, "c", 1.3 - 0.4j)
    err = (d.dag() @ d - hb.identity(dims)).to_dense()
    assert np.abs(err).max() < 1e-10


def test_displacement_matches_laguerre_closed_form():
    # <m|D(beta)|n> = sqrt(n!/m!) beta^(m-n) exp(-|beta|^2/2) L_n^(m-n)(|beta|^2), m >= n
    beta = 0.7 + 0.3j
    cutoff, interior = 30, 12
    dims = hb.ModeDims(1, 1, cutoff)
    d = hb.displacement(dims, "c", beta).to_dense()
    x = abs(beta) ** 2
    for m in range(interior):
        for n in range(interior):
            if m >= n:
                val = (
                    np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
                    * beta ** (m - n)
                    * np.exp(-x / 2)
                    * eval_genlaguerre(n, m - n, x)
                )
            else:
                val = (
                    np.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
                    * (-np.conj(beta)) ** (n - m)
                    * np.exp(-x / 2)
                    * eval_genlaguerre(m, n - m, x)
                )
            assert abs(d[m, n] - val) < 1e-10


def test_displaced_vacuum_is_poissonian():
    dims = hb.ModeDims(1, 1, 30)
    d = hb.displacement(dims, "c", 1.0)
    psi = hb.QuantumState(dims, d.data @ hb.vacuum(dims).data)
    n_op = hb.number(dims, "c")
    assert abs(n_op.expect(psi).real - 1.0) < 1e-8
    pops = np.abs(psi.data) ** 2
    for k in range(10):
        assert abs(pops[k] - np.exp(-1.0) / math.factorial(k)) < 1e-10


def test_displaced_lowering_operator_shifts():
    # D(alpha)^dag c D(alpha) = c + alpha on the interior block
    alpha = 0.8 - 0.5j
    dims = hb.ModeDims(1, 1, 40)
    d = hb.displacement(dims, "c", alpha)
    c = hb.destroy(dims, "c")
    shifted = (d.dag() @ c @ d).to_dense()
    expected = c.to_dense() + alpha * np.eye(dims.dim)
    interior = 15
    assert np.abs(shifted[:interior, :interior] - expected[:interior, :interior]).max() < 1e-8


def test_displacement_warns_when_cutoff_tight():
    dims = hb.ModeDims(1, 1, 8)
    with pytest.warns(hb.TruncationWarning):
        hb.displacement(dims, "c", 2.0)


def test_coherent_state_moments():
    dims = hb.ModeDims(1, 1, 40)
    psi = hb.coherent_state(dims, "c", 2.0)
    assert abs(psi.norm() - 1.0) < 1e-12
    n_op = hb.number(dims, "c")
    assert abs(n_op.expect(psi).real - 4.0) < 1e-9
    assert abs(hb.destroy(dims, "c").expect(psi) - 2.0) < 1e-9
    # other modes stay in vacuum
    assert abs(hb.number(dims, "a").expect(psi)) < 1e-14


def test_coherent_state_tail_warning():
    with pytest.warns(hb.TruncationWarning):
        hb.coherent_state(hb.ModeDims(1, 1, 10), "c", 3.0)


def test_thermal_state_geometric_moments():
    nbar = 0.5
    dims = hb.ModeDims(1, 1, 60)
    rho = hb.thermal_state(dims, "c", nbar)
    n_op = hb.number(dims, "c")
    n2_op = n_op @ n_op
    mean_n = n_op.expect(rho).real
    var = n2_op.expect(rho).real - mean_n**2
    assert abs(rho.norm() - 1.0) < 1e-12
    assert abs(mean_n - nbar) < 1e-9
    assert abs(var - nbar * (1 + nbar)) < 1e-9
    # normally ordered g2 of a thermal state is 2
    cdag_c = hb.create(dims, "c") @ hb.create(dims, "c") @ hb.destroy(dims, "c") @ hb.destroy(dims, "c")
    g2 = cdag_c.expect(rho).real / mean_n**2
    assert abs(g2 - 2.0) < 1e-6


def test_thermal_state_tail_warning():
    with pytest.warns(hb.TruncationWarning):
        hb.thermal_state(hb.ModeDims(1, 1, 6), "c", 2.0)


def test_partial_trace_of_product_state():
    dims = hb.ModeDims(2, 2, 25)
    psi = hb.coherent_state(dims, "c", 1.5)
    red = hb.partial_trace(psi, "c")
    assert red.dims.as_tuple() == (1, 1, 25)
    rho = red.data
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.abs(rho - rho.conj().T).max() < 1e-12
    n_red = hb.number(red.dims, "c")
    assert abs(n_red.expect(red).real - 2.25) < 1e-9


def test_partial_trace_of_entangled_state():
    # (|00> + |11>)/sqrt(2) across a and b: each marginal is maximally mixed
    dims = hb.ModeDims(2, 2, 1)
    psi = (hb.basis(dims, (0, 0, 0)).data + hb.basis(dims, (1, 1, 0)).data) / np.sqrt(2)
    state = hb.QuantumState(dims, psi)
    for mode in ("a", "b"):
        red = hb.partial_trace(state, mode)
        assert np.allclose(red.data, 0.5 * np.eye(2), atol=1e-14)


def test_partial_trace_keeps_middle_mode():
    rng = np.random.default_rng(7)
    dims = hb.ModeDims(2, 3, 4)
    vec = rng.normal(size=dims.dim) + 1j * rng.normal(size=dims.dim)
    vec /= np.linalg.norm(vec)
    red = hb.partial_trace(hb.QuantumState(dims, vec), "b")
    assert red.dims.as_tuple() == (1, 3, 1)
    assert abs(np.trace(red.data) - 1.0) < 1e-12
    evals = np.linalg.eigvalsh(red.data)
    assert evals.min() > -1e-12


def test_dimension_mismatch_rejected():
    d1, d2 = hb.ModeDims(2, 2, 3), hb.ModeDims(2, 2, 4)
    with pytest.raises(ValueError):
        hb.destroy(d1, "c") @ hb.destroy(d2, "c")
    with pytest.raises(ValueError):
        hb.destroy(d1, "c") + hb.destroy(d2, "c")
    with pytest.raises(ValueError):
        hb.number(d1, "c").expect(hb.vacuum(d2))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        hb.destroy(hb.ModeDims(2, 2, 2), "d")


def test_total_dimension_guard():
    with pytest.raises(ValueError):
        hb.ModeDims(100, 100, 100)
    big = hb.ModeDims(100, 100, 100, max_total=2_000_000)
    assert big.dim == 1_000_000


def test_scalar_algebra_adds_identity():
    dims = hb.ModeDims(1, 1, 5)
    c = hb.destroy(dims, "c")
    shifted = c + 2.0
    psi = hb.vacuum(dims)
    assert abs(shifted.expect(psi) - 2.0) < 1e-14
    assert abs((2.0 - c).expect(psi) - 2.0) < 1e-14


def test_hermiticity_check():
    dims = hb.ModeDims(1, 1, 6)
    c = hb.destroy(dims, "c")
    assert (c + c.dag()).is_hermitian()
    assert not c.is_hermitian()
