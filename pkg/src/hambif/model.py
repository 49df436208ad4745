"""Hamiltonian system descriptions: evaluators, symmetries, equilibria, presets.

A system is a first-order flow ``z' = J grad H(z)`` on R^(2N).  Continuous
symmetries are encoded by Lie-algebra generators ``X`` (skew-symmetric,
commuting with J); group elements are sampled as matrix exponentials
``exp(t X)``.  Finite groups are out of scope; the empty generator list is
the trivial group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import (
    DegenerateSection,
    EvaluationFailure,
    HambifError,
    MissingParameter,
    NoConvergence,
    UnknownPreset,
)
from .linalg import (
    compress,
    orthogonal_complement,
    orthonormal_columns,
    standard_symplectic,
)

__all__ = [
    "EARTH_J2",
    "SymmetryGroup",
    "HamiltonianSystem",
    "EquilibriumOrbit",
    "InvarianceReport",
    "gradient_of",
    "hessian_of",
    "invariance_check",
    "refine_equilibrium",
    "newtonian_to_hamiltonian",
    "preset",
    "preset_info",
    "satellite_equilibrium_distance",
    "gradient_equivariance_residual",
]

# Earth dynamical form factor (dimensionless second zonal harmonic).
EARTH_J2 = 1.0826359e-3

_FD_GRADIENT_STEP = 1e-6
_FD_HESSIAN_STEP = 1e-4


@dataclass(frozen=True)
class SymmetryGroup:
    """Connected symmetry group given by Lie-algebra generators on R^(2N).

    Each generator must be skew-symmetric and commute with the standard
    symplectic matrix (so the one-parameter subgroups are unitary).  An
    empty generator tuple encodes the trivial group.
    """

    generators: tuple = ()

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=float) for g in self.generators)
        for g in gens:
            if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
                raise ValueError(f"generator must be square of even size, got {g.shape}")
            scale = 1.0 + float(np.max(np.abs(g)))
            if float(np.max(np.abs(g + g.T))) > 1e-12 * scale:
                raise ValueError("generator is not skew-symmetric")
            j = standard_symplectic(g.shape[0] // 2)
            if float(np.max(np.abs(g @ j - j @ g))) > 1e-12 * scale:
                raise ValueError("generator does not commute with the symplectic matrix")
        object.__setattr__(self, "generators", gens)

    @property
    def group_dim(self) -> int:
        return len(self.generators)

    def element(self, index: int, t: float) -> np.ndarray:
        """Group element exp(t * X_index)."""
        return expm(t * self.generators[index])

    @staticmethod
    def trivial() -> "SymmetryGroup":
        return SymmetryGroup(())


@dataclass
class HamiltonianSystem:
    """Energy function on R^(2N) with optional analytic derivatives.

    ``gradient``/``hessian`` may be omitted; central finite differences on
    ``energy`` are used as the fallback.  Evaluators must be pure and
    reentrant.
    """

    n: int
    energy: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    symmetry: SymmetryGroup = field(default_factory=SymmetryGroup.trivial)
    name: str = ""

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class EquilibriumOrbit:
    """A critical point of H together with bases adapted to its group orbit."""

    z0: np.ndarray
    gradient_norm: float
    tangent_basis: np.ndarray  # (2N, orbit_dim), orthonormal span of {X z0}
    section_basis: np.ndarray  # (2N, 2N - orbit_dim), orthonormal complement
    orbit_dim: int
    isotropy_trivial: bool


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    max_violation: float
    samples: int


def _energy_at(system: HamiltonianSystem, z: np.ndarray) -> float:
    try:
        return float(system.energy(z))
    except HambifError:
        raise
    except Exception as exc:
        raise EvaluationFailure(f"energy evaluator failed at |z|={np.linalg.norm(z):.3g}: {exc}") from exc


def gradient_of(system: HamiltonianSystem, z) -> np.ndarray:
    """Gradient of H at z: supplied evaluator, else central differences."""
    z = np.asarray(z, dtype=float)
    if system.gradient is not None:
        try:
            return np.asarray(system.gradient(z), dtype=float)
        except HambifError:
            raise
        except Exception as exc:
            raise EvaluationFailure(f"gradient evaluator failed: {exc}") from exc
    g = np.empty(system.dim)
    for i in range(system.dim):
        h = _FD_GRADIENT_STEP * (1.0 + abs(z[i]))
        zp = z.copy()
        zm = z.copy()
        zp[i] += h
        zm[i] -= h
        g[i] = (_energy_at(system, zp) - _energy_at(system, zm)) / (2.0 * h)
    return g


def hessian_of(system: HamiltonianSystem, z) -> np.ndarray:
    """Hessian of H at z, symmetrized as (M + M^T)/2.

    Uses the supplied evaluator when present, central differences of the
    gradient when only that is available, and second differences of the
    energy otherwise.
    """
    z = np.asarray(z, dtype=float)
    d = system.dim
    if system.hessian is not None:
        try:
            m = np.asarray(system.hessian(z), dtype=float)
        except HambifError:
            raise
        except Exception as exc:
            raise EvaluationFailure(f"hessian evaluator failed: {exc}") from exc
        return 0.5 * (m + m.T)
    if system.gradient is not None:
        m = np.empty((d, d))
        for i in range(d):
            h = _FD_GRADIENT_STEP * (1.0 + abs(z[i]))
            zp = z.copy()
            zm = z.copy()
            zp[i] += h
            zm[i] -= h
            m[:, i] = (gradient_of(system, zp) - gradient_of(system, zm)) / (2.0 * h)
        return 0.5 * (m + m.T)
    m = np.empty((d, d))
    steps = _FD_HESSIAN_STEP * (1.0 + np.abs(z))
    for i in range(d):
        for jj in range(i, d):
            hi, hj = steps[i], steps[jj]
            zpp = z.copy()
            zpm = z.copy()
            zmp = z.copy()
            zmm = z.copy()
            zpp[i] += hi
            zpp[jj] += hj
            zpm[i] += hi
            zpm[jj] -= hj
            zmp[i] -= hi
            zmp[jj] += hj
            zmm[i] -= hi
            zmm[jj] -= hj
            val = (
                _energy_at(system, zpp)
                - _energy_at(system, zpm)
                - _energy_at(system, zmp)
                + _energy_at(system, zmm)
            ) / (4.0 * hi * hj)
            m[i, jj] = val
            m[jj, i] = val
    return 0.5 * (m + m.T)


def invariance_check(
    system: HamiltonianSystem,
    samples: int,
    seed: int = 0,
    base=None,
    spread: float = 1.0,
) -> InvarianceReport:
    """Check H(gamma z) = H(z) at random probe points and group elements.

    Probes are ``base + spread * normal`` draws, group elements are
    ``exp(t X)`` with t uniform in (0, 2 pi).  The check passes when every
    violation stays below ``1e-8 * (1 + |H(z)|)``.  A trivial group passes
    vacuously.
    """
    rng = np.random.default_rng(seed)
    base = np.zeros(system.dim) if base is None else np.asarray(base, dtype=float)
    worst = 0.0
    for _ in range(samples):
        z = base + spread * rng.standard_normal(system.dim)
        hz = _energy_at(system, z)
        for idx in range(system.symmetry.group_dim):
            t = rng.uniform(0.0, 2.0 * np.pi)
            gamma = system.symmetry.element(idx, t)
            violation = abs(_energy_at(system, gamma @ z) - hz) / (1.0 + abs(hz))
            worst = max(worst, violation)
    return InvarianceReport(passed=worst < 1e-8, max_violation=worst, samples=samples)


def gradient_equivariance_residual(
    system: HamiltonianSystem,
    probes: int,
    seed: int = 0,
    base=None,
    spread: float = 0.5,
) -> float:
    """Max of |grad H(exp(tX) z) - exp(tX) grad H(z)| over random probes."""
    rng = np.random.default_rng(seed)
    base = np.zeros(system.dim) if base is None else np.asarray(base, dtype=float)
    worst = 0.0
    for _ in range(probes):
        z = base + spread * rng.standard_normal(system.dim)
        g = gradient_of(system, z)
        for idx in range(system.symmetry.group_dim):
            t = rng.uniform(0.0, 2.0 * np.pi)
            gamma = system.symmetry.element(idx, t)
            resid = np.linalg.norm(gradient_of(system, gamma @ z) - gamma @ g)
            worst = max(worst, resid)
    return worst


def _orbit_bases(system: HamiltonianSystem, z: np.ndarray):
    tangents = [g @ z for g in system.symmetry.generators]
    if tangents:
        tangent = orthonormal_columns(np.column_stack(tangents))
    else:
        tangent = np.zeros((system.dim, 0))
    section = orthogonal_complement([tangent[:, i] for i in range(tangent.shape[1])], system.dim)
    return tangent, section


def _isotropy_trivial(system: HamiltonianSystem, z0: np.ndarray) -> bool:
    """Heuristic check that only the identity fixes z0 (64-point subgroup grid)."""
    scale = 1e-8 * (1.0 + float(np.linalg.norm(z0)))
    dim = system.dim
    for idx, gen in enumerate(system.symmetry.generators):
        if float(np.linalg.norm(gen @ z0)) <= scale:
            return False
        for k in range(1, 64):
            gamma = system.symmetry.element(idx, 2.0 * np.pi * k / 64.0)
            if float(np.linalg.norm(gamma - np.eye(dim))) < 1e-8:
                continue  # the element is the identity, not an isotropy witness
            if float(np.linalg.norm(gamma @ z0 - z0)) <= scale:
                return False
    return True


def refine_equilibrium(system: HamiltonianSystem, guess, max_iter: int = 50) -> EquilibriumOrbit:
    """Newton-refine a critical point of H, quotienting out the group direction.

    Each step solves the gradient system restricted to the orthogonal
    section at the current iterate, so the (flat) group direction never
    enters the linear solve.

    Raises
    ------
    NoConvergence
        If 50 iterations do not reach ``|grad H| < 1e-10 * (1 + |z|)``.
    DegenerateSection
        If the section-restricted Hessian is singular beyond tolerance.
    """
    z = np.asarray(guess, dtype=float).copy()
    best_z, best_norm = z.copy(), np.inf
    stall = 0
    for _ in range(max_iter):
        g = gradient_of(system, z)
        gn = float(np.linalg.norm(g))
        if gn < best_norm:
            if gn > 0.9 * best_norm:
                stall += 1
            else:
                stall = 0
            best_z, best_norm = z.copy(), gn
        else:
            stall += 1
        if gn <= 1e-13 * (1.0 + float(np.linalg.norm(z))) or stall >= 3:
            break
        _, section = _orbit_bases(system, z)
        hs = compress(hessian_of(system, z), section)
        w = np.linalg.eigvalsh(hs)
        if float(np.min(np.abs(w))) <= 1e-12 * (1.0 + float(np.max(np.abs(w)))):
            raise DegenerateSection(
                "section-restricted Hessian is singular; cannot Newton-refine"
            )
        du = np.linalg.solve(hs, -(section.T @ g))
        z = z + section @ du
    z0, gn = best_z, best_norm
    if not gn <= 1e-10 * (1.0 + float(np.linalg.norm(z0))):
        raise NoConvergence(f"gradient norm {gn:.3e} after {max_iter} iterations")
    tangent, section = _orbit_bases(system, z0)
    return EquilibriumOrbit(
        z0=z0,
        gradient_norm=gn,
        tangent_basis=tangent,
        section_basis=section,
        orbit_dim=tangent.shape[1],
        isotropy_trivial=_isotropy_trivial(system, z0),
    )


def newtonian_to_hamiltonian(
    potential: Callable[[np.ndarray], float],
    n: int,
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    generators=(),
    name: str = "",
) -> HamiltonianSystem:
    """First-order form of the second-order system ``q'' = -grad U(q)``.

    Produces ``H(q, r) = |r|^2 / 2 + U(q)`` on R^(2n) with the symmetry
    generators lifted diagonally to act on positions and momenta alike.
    """

    def energy(z):
        q, r = z[:n], z[n:]
        return 0.5 * float(r @ r) + float(potential(q))

    grad = None
    if gradient is not None:
        def grad(z):
            return np.concatenate([np.asarray(gradient(z[:n]), dtype=float), z[n:]])

    hess = None
    if hessian is not None:
        def hess(z):
            m = np.zeros((2 * n, 2 * n))
            m[:n, :n] = np.asarray(hessian(z[:n]), dtype=float)
            m[n:, n:] = np.eye(n)
            return m

    lifted = []
    for x in generators:
        x = np.asarray(x, dtype=float)
        big = np.zeros((2 * n, 2 * n))
        big[:n, :n] = x
        big[n:, n:] = x
        lifted.append(big)
    return HamiltonianSystem(
        n=n,
        energy=energy,
        gradient=grad,
        hessian=hess,
        symmetry=SymmetryGroup(tuple(lifted)),
        name=name or "newtonian",
    )


def satellite_equilibrium_distance(omega: float, c: float) -> float:
    """Unique positive root of ``omega^2 d^5 - d^2 - 3 c = 0``.

    Bracketing plus Brent, then a Newton polish down to residual below
    1e-12.  Existence and uniqueness of the positive root follow from the
    single sign change of the coefficient sequence.
    """
    if omega <= 0.0 or c <= 0.0:
        raise ValueError("omega and c must be positive")

    def f(d):
        return omega**2 * d**5 - d**2 - 3.0 * c

    hi = 1.0
    while f(hi) <= 0.0:
        hi *= 2.0
    root = brentq(f, 0.0, hi, xtol=1e-15, rtol=8.9e-16)
    for _ in range(3):
        root -= f(root) / (5.0 * omega**2 * root**4 - 2.0 * root)
    return float(root)


def _satellite_system(omega: float, c: float) -> HamiltonianSystem:
    e3 = np.array([0.0, 0.0, 1.0])

    def potential(q):
        d2 = float(q @ q)
        d = np.sqrt(d2)
        return -1.0 / d - c / d**3 + 3.0 * c * q[2] ** 2 / d**5

    def grad_potential(q):
        d2 = float(q @ q)
        d = np.sqrt(d2)
        d3, d5, d7 = d * d2, d * d2 * d2, d * d2 * d2 * d2
        g = (1.0 / d3 + 3.0 * c / d5 - 15.0 * c * q[2] ** 2 / d7) * q
        g[2] += 6.0 * c * q[2] / d5
        return g

    def hess_potential(q):
        d2 = float(q @ q)
        d = np.sqrt(d2)
        d3 = d * d2
        d5 = d3 * d2
        d7 = d5 * d2
        d9 = d7 * d2
        q3 = q[2]
        s1 = 1.0 / d3 + 3.0 * c / d5
        s2 = -3.0 / d5 - 15.0 * c / d7
        m = (s1 - 15.0 * c * q3**2 / d7) * np.eye(3)
        m += (s2 + 105.0 * c * q3**2 / d9) * np.outer(q, q)
        m += (6.0 * c / d5) * np.outer(e3, e3)
        m -= (30.0 * c * q3 / d7) * (np.outer(e3, q) + np.outer(q, e3))
        return m

    coupling = np.array([[0.0, omega, 0.0], [-omega, 0.0, 0.0], [0.0, 0.0, 0.0]])

    def energy(z):
        q, p = z[:3], z[3:]
        return 0.5 * float(p @ p) + omega * (q[0] * p[1] - q[1] * p[0]) + potential(q)

    def gradient(z):
        q, p = z[:3], z[3:]
        gq = grad_potential(q) + omega * np.array([p[1], -p[0], 0.0])
        gp = p + omega * np.array([-q[1], q[0], 0.0])
        return np.concatenate([gq, gp])

    def hessian(z):
        q = z[:3]
        m = np.zeros((6, 6))
        m[:3, :3] = hess_potential(q)
        m[:3, 3:] = coupling
        m[3:, :3] = coupling.T
        m[3:, 3:] = np.eye(3)
        return m

    spin = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    generator = np.zeros((6, 6))
    generator[:3, :3] = spin
    generator[3:, 3:] = spin
    return HamiltonianSystem(
        n=3,
        energy=energy,
        gradient=gradient,
        hessian=hessian,
        symmetry=SymmetryGroup((generator,)),
        name="satellite",
    )


def preset_info() -> dict:
    """Preset registry: parameters with defaults plus provenance notes."""
    return {
        "satellite": {
            "parameters": {
                "omega": 1.0,
                "c": 0.5 * EARTH_J2,
                "j2": EARTH_J2,
                "r_eq": 1.0,
            },
            "notes": (
                "Rotating-frame motion about an oblate spheroid, gravitational "
                "potential truncated at the second zonal harmonic; c = r_eq^2 * j2 / 2 "
                "(explicit c overrides j2/r_eq); default j2 is the Earth value "
                "1.0826359e-03; SO(2) symmetry about the rotation axis."
            ),
        },
        "harmonic": {
            "parameters": {"beta": 1.0},
            "notes": "Single oscillator H = (p^2 + beta^2 q^2) / 2; trivial symmetry.",
        },
        "coupled-springs": {
            "parameters": {"frequencies": None},
            "notes": (
                "Second-order system with U(q) = sum (f_i q_i)^2 / 2 lifted to "
                "first order; 'frequencies' is required (list of f_i)."
            ),
        },
    }


def preset(name: str, params: Optional[dict] = None, **kwargs) -> HamiltonianSystem:
    """Build a named system. Known names: satellite, harmonic, coupled-springs."""
    merged = dict(params or {})
    merged.update(kwargs)
    if name == "satellite":
        omega = float(merged.pop("omega", 1.0))
        if "c" in merged:
            c = float(merged.pop("c"))
            merged.pop("j2", None)
            merged.pop("r_eq", None)
        else:
            j2 = float(merged.pop("j2", EARTH_J2))
            r_eq = float(merged.pop("r_eq", 1.0))
            c = 0.5 * r_eq**2 * j2
        _reject_extras(name, merged)
        if omega <= 0.0 or c <= 0.0:
            raise ValueError("satellite preset needs omega > 0 and c > 0")
        return _satellite_system(omega, c)
    if name == "harmonic":
        beta = float(merged.pop("beta", 1.0))
        _reject_extras(name, merged)
        if beta <= 0.0:
            raise ValueError("harmonic preset needs beta > 0")
        return HamiltonianSystem(
            n=1,
            energy=lambda z: 0.5 * (z[1] ** 2 + beta**2 * z[0] ** 2),
            gradient=lambda z: np.array([beta**2 * z[0], z[1]]),
            hessian=lambda z: np.diag([beta**2, 1.0]),
            name="harmonic",
        )
    if name == "coupled-springs":
        if "frequencies" not in merged:
            raise MissingParameter("coupled-springs preset needs 'frequencies'")
        freqs = np.asarray(merged.pop("frequencies"), dtype=float).ravel()
        _reject_extras(name, merged)
        if freqs.size == 0 or np.any(freqs <= 0.0):
            raise ValueError("frequencies must be a non-empty list of positive reals")
        stiff = freqs**2

        return newtonian_to_hamiltonian(
            potential=lambda q: 0.5 * float(stiff @ (q * q)),
            n=freqs.size,
            gradient=lambda q: stiff * q,
            hessian=lambda q: np.diag(stiff),
            name="coupled-springs",
        )
    raise UnknownPreset(f"unknown preset {name!r}")


def _reject_extras(name: str, leftover: dict) -> None:
    if leftover:
        raise ValueError(f"unknown parameters for preset {name!r}: {sorted(leftover)}")
