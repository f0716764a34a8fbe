import cmath
import math

import numpy as np
import pytest

from cdlab.canonical import (
    DomainError,
    Hamiltonian,
    J,
    jacobi_hamiltonian,
    kernel_kh,
    mobius,
    opuc_hamiltonian,
    rescale_h,
    schrodinger_kernel,
    transfer_form_integral,
    transfer_matrix,
    weyl,
)
from cdlab.measures import RegVarFn, cauchy_transform, gallery
from cdlab.oprl import interp_kernel, stieltjes_coeffs
from cdlab.opuc import VerblunskyCoeffs, opuc_canonical_kernel


@pytest.fixture(scope="module")
def cheb():
    return stieltjes_coeffs(gallery("chebyshev"), 40)


def test_hamiltonian_validation():
    with pytest.raises(ValueError):
        Hamiltonian(np.array([1.0]), np.array([[[1.0, 0.0], [0.0, -0.5]]]))
    with pytest.raises(ValueError):
        Hamiltonian(np.array([-1.0]), np.array([[[1.0, 0.0], [0.0, 1.0]]]))


def test_rank_one_transfer_alpha_zero():
    e = np.array([1.0, 0.0])
    h = Hamiltonian(np.array([1.0]), np.outer(e, e)[None, :, :])
    z = 0.7 - 0.3j
    w = transfer_matrix(h, 1.0, z).entries
    assert np.max(np.abs(w - np.array([[1.0, z], [0.0, 1.0]]))) <= 1e-15


def test_transfer_identity_at_zero():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(2, 2))
    m = m @ m.T
    h = Hamiltonian(np.array([1.5, 0.7]), np.array([m, m / 3.0]))
    w = transfer_matrix(h, 2.0, 0.0).entries
    assert np.max(np.abs(w - np.eye(2))) <= 1e-15


def test_free_half_rotation_vs_fine_step_product():
    # closed form for H = I/2 against a fine-step Euler-like product oracle
    h = Hamiltonian.constant(np.eye(2) / 2.0, length=10.0)
    z = 0.8 + 0.3j
    t = 3.7
    w = transfer_matrix(h, t, z).entries
    expected = np.array([
        [cmath.cos(t * z / 2), cmath.sin(t * z / 2)],
        [-cmath.sin(t * z / 2), cmath.cos(t * z / 2)],
    ])
    assert np.max(np.abs(w - expected)) <= 1e-12
    # product oracle: many short pieces of the same Hamiltonian
    n = 2000
    h_fine = Hamiltonian(np.full(n, t / n), np.tile(np.eye(2) / 2.0, (n, 1, 1)))
    w_fine = transfer_matrix(h_fine, t, z).entries
    assert np.max(np.abs(w - w_fine)) <= 1e-10


def test_det_unimodular():
    rng = np.random.default_rng(3)
    mats = []
    for _ in range(5):
        m = rng.normal(size=(2, 2))
        m = m @ m.T + 1e-3 * np.eye(2)
        mats.append(m / np.trace(m))
    h = Hamiltonian(rng.uniform(0.2, 1.0, 5), np.array(mats))
    for t in (0.3, 1.7, h.total_length):
        w = transfer_matrix(h, t, 1.2 - 0.8j).entries
        assert abs(np.linalg.det(w) - 1.0) <= 1e-10 * max(1.0, np.max(np.abs(w)) ** 2)


def test_domain_error_without_tail():
    h = Hamiltonian(np.array([1.0]), np.eye(2)[None, :, :] / 2.0)
    with pytest.raises(DomainError):
        transfer_matrix(h, 2.0, 1.0)
    h_tail = Hamiltonian(np.array([1.0]), np.eye(2)[None, :, :] / 2.0,
                         tail=np.eye(2) / 2.0)
    transfer_matrix(h_tail, 2.0, 1.0)  # no error


def test_kernel_kh_free_half():
    h = Hamiltonian.constant(np.eye(2) / 2.0, length=30.0, tail=True)
    z, w = 0.9 + 0.2j, -0.4 + 0.1j
    u = z - np.conj(w)
    for t in (0.0, 2.5, 9.0):
        val = kernel_kh(h, t, z, w)
        expected = 0.0 if t == 0.0 else cmath.sin(t * u / 2.0) / u
        assert abs(val - expected) <= 1e-12 * max(1.0, abs(expected))
    assert abs(kernel_kh(h, 7.0, 0.0, 0.0) - 3.5) <= 1e-12


def test_kernel_kh_hermitian():
    rng = np.random.default_rng(12)
    m = rng.normal(size=(2, 2))
    m = m @ m.T
    h = Hamiltonian(np.array([2.0, 1.0]), np.array([m / np.trace(m), np.eye(2) / 2]))
    z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
    w = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
    a = kernel_kh(h, 2.4, z, w)
    b = kernel_kh(h, 2.4, w, z)
    assert abs(a - b.conjugate()) <= 1e-12 * max(1.0, abs(a))


def test_j_inner_integral_identity():
    rng = np.random.default_rng(6)
    mats = []
    for _ in range(4):
        m = rng.normal(size=(2, 2))
        m = m @ m.T + 1e-2 * np.eye(2)
        mats.append(m / np.trace(m))
    h = Hamiltonian(rng.uniform(0.3, 1.0, 4), np.array(mats))
    t = h.total_length
    z, w = 0.8 + 0.4j, -0.2 + 0.9j
    wz = transfer_matrix(h, t, z).entries
    ww = transfer_matrix(h, t, w).entries
    lhs = (wz @ J @ ww.conj().T - J) / (z - np.conj(w))
    rhs = transfer_form_integral(h, t, z, w, n_quad=32)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8


def test_weyl_free_half():
    h = Hamiltonian.constant(np.eye(2) / 2.0, length=50.0, tail=True)
    for z in (1j, 0.5 + 0.8j, -1.2 + 0.3j):
        wv = weyl(h, z, 45.0)
        assert abs(wv.q - 1j) <= 1e-12
        assert wv.disk_radius <= 1e-5


def test_weyl_rank_one_limit():
    # H = diag(0,1): W = [[1,0],[-lz,1]], so W * i -> 0 as l grows
    h = Hamiltonian(np.array([500.0]), np.array([[[0.0, 0.0], [0.0, 1.0]]]))
    wv = weyl(h, 1j, 500.0)
    assert abs(wv.q) <= 3e-3


def test_weyl_requires_upper_half():
    h = Hamiltonian.constant(np.eye(2) / 2.0, length=5.0)
    with pytest.raises(ValueError):
        weyl(h, 1.0, 5.0)


def test_weyl_matches_cauchy_transform(cheb):
    # the decisive measure <-> canonical-system correspondence at z = i
    mu = gallery("chebyshev")
    rec = stieltjes_coeffs(mu, 201)
    ham = jacobi_hamiltonian(rec, 200)
    wv = weyl(ham, 1j, 200.0)
    m = cauchy_transform(mu, 1j)
    assert abs(wv.q - m) <= 1e-6


def test_rescale_h_identities():
    rng = np.random.default_rng(7)
    mats = []
    for _ in range(5):
        m = rng.normal(size=(2, 2))
        m = m @ m.T + 1e-3 * np.eye(2)
        mats.append(m / np.trace(m))
    h = Hamiltonian(rng.uniform(0.3, 1.0, 5), np.array(mats))
    g = RegVarFn(scale=1.4, index=1.1)
    for r in (0.5, 3.0):
        hr = rescale_h(h, g, r)
        # lengths divided by r; per-piece determinant invariant
        assert np.allclose(hr.lengths, h.lengths / r)
        assert np.allclose(np.linalg.det(hr.matrices), np.linalg.det(h.matrices))
        # kernel rescaling identity
        t = h.total_length / r * 0.8
        z, w = 0.6 + 0.4j, -0.2 - 0.1j
        lhs = kernel_kh(hr, t, z, w)
        rhs = kernel_kh(h, r * t, z / r, w / r) / g(r)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))
    # r = 1 with g(1) = 1 leaves H unchanged
    hr1 = rescale_h(h, RegVarFn(scale=1.0, index=1.0), 1.0)
    assert np.allclose(hr1.matrices, h.matrices)


def test_jacobi_hamiltonian_blocks(cheb):
    ham = jacobi_hamiltonian(cheb, 3)
    assert np.allclose(ham.matrices[0], [[0.0, 0.0], [0.0, 1.0]])
    assert np.allclose(ham.matrices[1], [[2.0, 0.0], [0.0, 0.0]], atol=1e-9)
    assert np.allclose(np.linalg.det(ham.matrices), 0.0, atol=1e-12)


def test_jacobi_kernel_equals_interpolated_cd(cheb):
    ham = jacobi_hamiltonian(cheb, 32)
    rng = np.random.default_rng(15)
    for _ in range(8):
        t = rng.uniform(0.0, 30.0)
        z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        w = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        lhs = kernel_kh(ham, t, z, w)
        rhs = interp_kernel(cheb, t, z, w)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_opuc_hamiltonian_free_pieces():
    v = VerblunskyCoeffs.free(4)
    ham = opuc_hamiltonian(v, 4)
    for m in ham.matrices:
        assert np.allclose(m, np.eye(2) / 2.0)


def test_opuc_hamiltonian_kernel_equality():
    rng = np.random.default_rng(20)
    v = VerblunskyCoeffs(rng.uniform(-0.5, 0.5, 16) + 1j * rng.uniform(-0.5, 0.5, 16))
    ham = opuc_hamiltonian(v, 16)
    for m in ham.matrices:  # PSD with positive determinant in general
        evals = np.linalg.eigvalsh(m)
        assert evals[0] >= -1e-14
    for _ in range(8):
        t = rng.uniform(0.0, 15.0)
        z = complex(rng.uniform(-2, 2), rng.uniform(-0.6, 0.6))
        w = complex(rng.uniform(-2, 2), rng.uniform(-0.6, 0.6))
        lhs = kernel_kh(ham, t, z, w)
        rhs = opuc_canonical_kernel(v, t, z, w)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_mobius_point_at_infinity():
    m = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert mobius(m, cmath.inf) == 2.0


def test_schrodinger_free_closed_form():
    # V = 0, Dirichlet: u(x,z) = -sin(x sqrt z)/sqrt z; kernel from the
    # product-to-sum antiderivative as the oracle
    z, w = 1.0 + 0.2j, 2.0
    x = 5.0
    val = schrodinger_kernel(lambda y: 0.0, 0.0, x, z, w, tol=1e-10)
    sz = cmath.sqrt(z)
    sw = cmath.sqrt(np.conj(w))
    closed = (cmath.sin((sz - sw) * x) / (2 * (sz - sw))
              - cmath.sin((sz + sw) * x) / (2 * (sz + sw))) / (sz * sw)
    assert abs(val.quadrature - closed) <= 1e-8
    assert abs(val.wronskian - closed) <= 1e-8
    assert abs(val.quadrature - val.wronskian) <= 1e-8 * (1 + abs(closed))


def test_schrodinger_diagonal_positive():
    val = schrodinger_kernel(lambda y: 0.0, 0.0, 5.0, 2.0, 2.0)
    assert val.quadrature.imag == pytest.approx(0.0, abs=1e-12)
    assert val.quadrature.real > 0
    assert abs(val.quadrature - val.wronskian) <= 1e-8 * (1 + abs(val.quadrature))


def test_schrodinger_with_potential_two_forms_agree():
    val = schrodinger_kernel(lambda y: 0.3 * math.cos(y), 0.7, 4.0,
                             1.3 + 0.1j, 0.9 - 0.2j, tol=1e-9)
    assert abs(val.quadrature - val.wronskian) <= 1e-8 * (1 + abs(val.quadrature))


def test_kernel_diag_nondecreasing_in_t():
    rng = np.random.default_rng(31)
    mats = []
    for _ in range(4):
        m = rng.normal(size=(2, 2))
        m = m @ m.T + 1e-3 * np.eye(2)
        mats.append(m / np.trace(m))
    h = Hamiltonian(rng.uniform(0.4, 1.2, 4), np.array(mats))
    for z in (0.7, 0.3 + 0.8j):
        vals = [kernel_kh(h, t, z, z).real for t in np.linspace(0.1, h.total_length, 12)]
        assert all(b >= a - 1e-12 * max(abs(b), 1.0) for a, b in zip(vals, vals[1:]))


def test_mixed_measure_weyl_loop():
    # atoms + AC piece through Stieltjes -> Jacobi Hamiltonian -> Weyl must
    # reproduce the (normalized) Cauchy transform of the measure
    from cdlab.measures import AcPiece, Measure

    mu = Measure(
        np.array([-0.5, 0.8]), np.array([0.4, 0.2]),
        pieces=(AcPiece(-1.0, 1.0, lambda x: np.full_like(x, 0.35)),),
    )
    total = mu.total_mass
    rec = stieltjes_coeffs(mu, 121)
    assert abs(rec.mass_factor - total) <= 1e-10
    ham = jacobi_hamiltonian(rec, 120)
    for z in (1j, 0.5 + 0.7j):
        q = weyl(ham, z, 120.0).q
        m = cauchy_transform(mu, z) / total
        assert abs(q - m) <= 1e-6
