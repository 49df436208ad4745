import numpy as np
import pytest

from hambif import linalg, model
from hambif.errors import MissingParameter, NoConvergence, UnknownPreset


def _bisect_quintic(omega, c, lo, hi, iters=200):
    # independent root oracle for omega^2 d^5 - d^2 - 3c
    f = lambda d: omega**2 * d**5 - d**2 - 3.0 * c
    assert f(lo) < 0.0 < f(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_symmetry_group_validation():
    good = np.array([[0.0, -1.0], [1.0, 0.0]])
    grp = model.SymmetryGroup((good,))
    assert grp.group_dim == 1
    with pytest.raises(ValueError):
        model.SymmetryGroup((np.eye(2),))  # not skew
    bad = np.zeros((4, 4))
    bad[0, 1], bad[1, 0] = -1.0, 1.0  # skew but does not commute with J
    with pytest.raises(ValueError):
        model.SymmetryGroup((bad,))


def test_preset_generators_exactly_valid():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    j = linalg.standard_symplectic(3)
    for g in sat.symmetry.generators:
        assert np.max(np.abs(g + g.T)) == 0.0
        assert np.max(np.abs(g @ j - j @ g)) == 0.0


def test_fd_gradient_and_hessian_quadratic():
    sys = model.HamiltonianSystem(n=2, energy=lambda z: 0.5 * float(z @ z))
    z = np.array([0.3, -1.2, 0.7, 2.0])
    assert np.allclose(model.gradient_of(sys, z), z, atol=1e-9)
    assert np.allclose(model.hessian_of(sys, z), np.eye(4), atol=1e-6)


def test_fd_gradient_matches_analytic_satellite():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    blind = model.HamiltonianSystem(n=3, energy=sat.energy)
    rng = np.random.default_rng(5)
    base = np.array([1.0, 0.0, 0.0, 0.0, -1.0, 0.0])
    for _ in range(10):
        z = base + 0.2 * rng.standard_normal(6)
        g_fd = model.gradient_of(blind, z)
        g = model.gradient_of(sat, z)
        assert np.linalg.norm(g_fd - g) / np.linalg.norm(g) < 1e-5


def test_fd_hessian_matches_analytic_satellite():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    grad_only = model.HamiltonianSystem(n=3, energy=sat.energy, gradient=sat.gradient)
    z = np.array([1.05, 0.1, -0.05, 0.02, -1.0, 0.03])
    h_fd = model.hessian_of(grad_only, z)
    h = model.hessian_of(sat, z)
    assert np.max(np.abs(h_fd - h)) < 1e-7


def test_invariance_check_satellite_passes():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    base = np.array([1.0, 0.0, 0.0, 0.0, -1.0, 0.0])
    rep = model.invariance_check(sat, samples=40, seed=1, base=base, spread=0.2)
    assert rep.passed
    assert rep.max_violation < 1e-10


def test_invariance_check_trivial_group_vacuous():
    sys = model.HamiltonianSystem(n=1, energy=lambda z: z[0] ** 4)
    rep = model.invariance_check(sys, samples=10, seed=0)
    assert rep.passed and rep.max_violation == 0.0


def test_invariance_check_detects_broken_symmetry():
    spin = np.array([[0.0, -1.0], [1.0, 0.0]])
    gen = np.zeros((4, 4))
    gen[:2, :2] = spin
    gen[2:, 2:] = spin
    sys = model.HamiltonianSystem(
        n=2,
        energy=lambda z: z[0],
        symmetry=model.SymmetryGroup((gen,)),
    )
    rep = model.invariance_check(sys, samples=20, seed=2)
    assert not rep.passed


def test_refine_equilibrium_quadratic():
    sys = model.HamiltonianSystem(
        n=1,
        energy=lambda z: 0.5 * float(z @ z),
        gradient=lambda z: z,
        hessian=lambda z: np.eye(2),
    )
    eq = model.refine_equilibrium(sys, np.array([0.7, -0.3]))
    assert np.linalg.norm(eq.z0) < 1e-12
    assert eq.orbit_dim == 0
    assert eq.section_basis.shape == (2, 2)


def test_satellite_equilibrium_distance():
    d0 = model.satellite_equilibrium_distance(1.0, 0.1)
    oracle = _bisect_quintic(1.0, 0.1, 1.0, 1.1)
    assert 1.0 < d0 < 1.1
    assert abs(d0 - oracle) < 1e-12
    assert abs(d0**5 - d0**2 - 0.3) < 1e-12


def test_satellite_equilibrium_distance_kepler_limit():
    for c in [1e-6, 1e-9, 1e-12]:
        d0 = model.satellite_equilibrium_distance(1.0, c)
        assert abs(d0 - 1.0) < 10.0 * c
        assert abs(d0**5 - d0**2 - 3 * c) < 1e-12


def test_refine_equilibrium_satellite():
    omega, c = 1.0, 0.1
    sat = model.preset("satellite", omega=omega, c=c)
    eq = model.refine_equilibrium(sat, np.array([1.0, 0.0, 0.0, 0.0, -omega, 0.0]))
    d0 = model.satellite_equilibrium_distance(omega, c)
    expected = np.array([d0, 0.0, 0.0, 0.0, -omega * d0, 0.0])
    assert np.linalg.norm(eq.z0 - expected) < 1e-9
    assert eq.orbit_dim == 1
    assert eq.gradient_norm < 1e-10 * (1.0 + np.linalg.norm(eq.z0))
    assert eq.isotropy_trivial
    # tangent vectors sit in the kernel of the Hessian
    h = model.hessian_of(sat, eq.z0)
    assert np.max(np.abs(h @ eq.tangent_basis)) < 1e-7
    # bases are mutually orthogonal and complete
    assert np.max(np.abs(eq.tangent_basis.T @ eq.section_basis)) < 1e-12
    assert eq.tangent_basis.shape[1] + eq.section_basis.shape[1] == 6


def test_satellite_hessian_sign_pattern():
    omega, c = 1.0, 0.1
    sat = model.preset("satellite", omega=omega, c=c)
    d0 = model.satellite_equilibrium_distance(omega, c)
    q_point = np.array([d0, 0.0, 0.0, 0.0, -omega * d0, 0.0])
    h = model.hessian_of(sat, q_point)
    v_rr = h[0, 0]
    v_zz = h[2, 2]
    v_rz = h[0, 2]
    assert v_rr < 0.0 < v_zz
    assert abs(v_rz) < 1e-12
    assert abs(v_rr - (-2.0 / d0**3 - 12.0 * c / d0**5)) < 1e-12
    assert abs(v_zz - (1.0 / d0**3 + 9.0 * c / d0**5)) < 1e-12
    assert abs(h[1, 1] - omega**2) < 1e-12


def test_gradient_equivariance_satellite():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    base = np.array([1.0, 0.0, 0.0, 0.0, -1.0, 0.0])
    resid = model.gradient_equivariance_residual(sat, probes=30, seed=3, base=base, spread=0.2)
    assert resid < 1e-7


def test_newtonian_lift_spectrum():
    sys = model.newtonian_to_hamiltonian(
        potential=lambda q: 0.5 * (q[0] ** 2 + 4.0 * q[1] ** 2),
        n=2,
        gradient=lambda q: np.array([q[0], 4.0 * q[1]]),
        hessian=lambda q: np.diag([1.0, 4.0]),
    )
    j = linalg.standard_symplectic(2)
    w = linalg.general_eigenvalues(j @ model.hessian_of(sys, np.zeros(4)))
    imag = sorted(v.imag for v in w)
    assert np.allclose(imag, [-2.0, -1.0, 1.0, 2.0], atol=1e-12)
    assert max(abs(v.real) for v in w) < 1e-12


def test_newtonian_flat_potential_no_imaginary_pairs():
    sys = model.newtonian_to_hamiltonian(potential=lambda q: 0.0, n=1)
    h = model.hessian_of(sys, np.zeros(2))
    assert np.allclose(h, np.diag([0.0, 1.0]), atol=1e-7)
    j = linalg.standard_symplectic(1)
    w = linalg.general_eigenvalues(j @ h)
    assert max(abs(v.imag) for v in w) < 1e-3  # FD noise only, no unit-size pair


def test_newtonian_lifted_generators_valid():
    spin = np.array([[0.0, -1.0], [1.0, 0.0]])
    sys = model.newtonian_to_hamiltonian(
        potential=lambda q: 0.5 * float(q @ q),
        n=2,
        generators=(spin,),
    )
    assert sys.symmetry.group_dim == 1  # SymmetryGroup validation passed


def test_preset_errors():
    with pytest.raises(UnknownPreset):
        model.preset("nope")
    with pytest.raises(MissingParameter):
        model.preset("coupled-springs")
    with pytest.raises(ValueError):
        model.preset("harmonic", beta=1.0, gamma=2.0)


def test_preset_harmonic_spectrum():
    sys = model.preset("harmonic", beta=1.0)
    j = linalg.standard_symplectic(1)
    w = np.sort_complex(linalg.general_eigenvalues(j @ model.hessian_of(sys, np.zeros(2))))
    assert np.allclose(w, [-1j, 1j], atol=1e-12)


def test_preset_satellite_earth_default():
    sys = model.preset("satellite")
    assert sys.name == "satellite"
    info = model.preset_info()
    assert info["satellite"]["parameters"]["j2"] == 1.0826359e-3
    assert info["satellite"]["parameters"]["c"] == 0.5 * 1.0826359e-3


def test_refine_equilibrium_no_convergence():
    # gradient bounded away from zero everywhere
    sys = model.HamiltonianSystem(
        n=1,
        energy=lambda z: z[0] + 0.5 * z[1] ** 2,
        gradient=lambda z: np.array([1.0, z[1]]),
        hessian=lambda z: np.diag([1e-2, 1.0]) + np.eye(2) * 1e-3,
    )
    with pytest.raises(NoConvergence):
        model.refine_equilibrium(sys, np.array([0.0, 0.5]))
