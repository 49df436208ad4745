"""Computable bifurcation criteria near a symmetric equilibrium.

Candidate levels are lambda = 1/beta_j, where +/- i beta_j runs through the
purely imaginary eigenvalue pairs of J * hessian(H).  Each candidate is put
through the checks below and aggregated into a verdict:

* resonance set: all levels k/beta_j at which the mode-k linearization of
  the 2-pi-periodic problem is singular;
* nonresonance: no other beta_j is an integer multiple of the chosen one
  (guarantees minimal periods for the emanating orbits);
* Morse jump: change of the negative index of the mode-1 block matrix
  across the level, evaluated on an interval isolating the level from the
  rest of the resonance set;
* index criteria on the invariant subspaces (equivalent to a nonzero jump
  for the level's own subspace, by the classical index theorem);
* Brouwer degree of the section-restricted gradient (delegated to
  :mod:`hambif.degree`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import degree as degree_mod
from .errors import EpsilonUnderflow, HambifError, NoImaginaryPairs
from .linalg import (
    check_symmetric,
    compress,
    general_eigenvalues,
    morse_index_negative,
    morse_index_positive,
    orthonormal_columns,
    real_invariant_subspace,
    standard_symplectic,
    zero_threshold,
)
from .model import EquilibriumOrbit, HamiltonianSystem, hessian_of

__all__ = [
    "SpectralReport",
    "ResonanceLevel",
    "ResonanceSet",
    "BifurcationCandidate",
    "AnalyzeOptions",
    "spectral_report",
    "matrix_report",
    "t_matrix",
    "resonance_set",
    "check_nonresonance",
    "morse_jump",
    "check_szulkin_zj",
    "check_definite_zj",
    "check_definite_z",
    "check_mplus",
    "newtonian_blocks",
    "analyze",
]

A7_VARIANTS = ("szulkin", "definite-zj", "definite-z", "mplus")


@dataclass(frozen=True)
class SpectralReport:
    """Eigen-data of the linearization at an equilibrium.

    ``betas`` are the distinct imaginary parts beta_1 > ... > beta_m > 0 of
    the eigenvalue pairs of J A, ``multiplicities`` their cluster sizes and
    ``subspaces`` the matching orthonormal real invariant subspace bases.
    """

    n: int
    hessian: np.ndarray
    hessian_eigenvalues: np.ndarray
    eigenvalues_ja: np.ndarray
    betas: tuple
    multiplicities: tuple
    subspaces: tuple
    m_plus: int
    m_minus: int
    kernel_dim: int

    def beta(self, j0: int) -> float:
        if not 1 <= j0 <= len(self.betas):
            raise IndexError(f"j0 must be in 1..{len(self.betas)}, got {j0}")
        return self.betas[j0 - 1]


@dataclass(frozen=True)
class ResonanceLevel:
    lam: float
    contributors: tuple  # of (k, j) pairs, j 1-based into report.betas


@dataclass(frozen=True)
class ResonanceSet:
    entries: tuple
    k_max: int

    def values(self) -> np.ndarray:
        return np.array([e.lam for e in self.entries])


def spectral_report(system: HamiltonianSystem, eq: EquilibriumOrbit) -> SpectralReport:
    """Assemble the spectral data of J * hessian(H) at the equilibrium."""
    return matrix_report(check_symmetric(hessian_of(system, eq.z0), tol=1e-9))


def matrix_report(a) -> SpectralReport:
    """Spectral report for a bare symmetric matrix acting as the Hessian."""
    a = check_symmetric(a)
    if a.shape[0] % 2:
        raise ValueError("the matrix must act on an even-dimensional space")
    n = a.shape[0] // 2
    wa = np.linalg.eigvalsh(a)
    eps_a = zero_threshold(wa)
    m_plus = int(np.sum(wa > eps_a))
    m_minus = int(np.sum(wa < -eps_a))
    ja = standard_symplectic(n) @ a
    wja = general_eigenvalues(ja)
    scale = 1.0 + float(np.max(np.abs(wja))) if wja.size else 1.0
    # the degenerate-orbit modes sit numerically near 0 and are not
    # oscillation frequencies; require beta well above the splitting noise
    beta_floor = 1e-6 * scale
    raw = sorted(
        (v.imag for v in wja if abs(v.real) < 1e-8 * scale and v.imag > beta_floor),
        reverse=True,
    )
    betas, mults = [], []
    i = 0
    while i < len(raw):
        cluster = [raw[i]]
        i += 1
        while i < len(raw) and abs(raw[i] - cluster[0]) < 1e-8 * (1.0 + cluster[0]):
            cluster.append(raw[i])
            i += 1
        betas.append(float(np.mean(cluster)))
        mults.append(len(cluster))
    bases = []
    for j, center in enumerate(betas):
        # keep the extraction window clear of the nearest distinct cluster
        gaps = [abs(center - other) for jj, other in enumerate(betas) if jj != j]
        tol = 1e-6
        if gaps:
            tol = min(tol, 0.4 * min(gaps) / scale)
        bases.append(real_invariant_subspace(ja, center, cluster_tol=max(tol, 1e-9)))
    return SpectralReport(
        n=n,
        hessian=a,
        hessian_eigenvalues=wa,
        eigenvalues_ja=wja,
        betas=tuple(betas),
        multiplicities=tuple(mults),
        subspaces=tuple(bases),
        m_plus=m_plus,
        m_minus=m_minus,
        kernel_dim=2 * n - m_plus - m_minus,
    )


def t_matrix(a, k: int, lam: float) -> np.ndarray:
    """Mode-k block matrix [[-(lam/k) A, -J], [J, -(lam/k) A]] (size 4N)."""
    a = check_symmetric(a)
    if k < 1:
        raise ValueError(f"mode index k must be >= 1, got {k}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    two_n = a.shape[0]
    if two_n % 2:
        raise ValueError("A must act on an even-dimensional space")
    j = standard_symplectic(two_n // 2)
    out = np.zeros((2 * two_n, 2 * two_n))
    out[:two_n, :two_n] = -(lam / k) * a
    out[two_n:, two_n:] = -(lam / k) * a
    out[:two_n, two_n:] = -j
    out[two_n:, :two_n] = j
    return out


def resonance_set(report: SpectralReport, k_max: int = 20) -> ResonanceSet:
    """All candidate levels k/beta_j for 1 <= k <= k_max, merged and sorted."""
    if not report.betas:
        raise NoImaginaryPairs("the linearization has no purely imaginary pairs")
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    items = sorted(
        (k / beta, k, j + 1)
        for j, beta in enumerate(report.betas)
        for k in range(1, k_max + 1)
    )
    entries = []
    for lam, k, j in items:
        if entries and abs(lam - entries[-1][0]) <= 1e-9 * entries[-1][0]:
            entries[-1][1].append((k, j))
        else:
            entries.append([lam, [(k, j)]])
    return ResonanceSet(
        entries=tuple(ResonanceLevel(lam=lam, contributors=tuple(c)) for lam, c in entries),
        k_max=k_max,
    )


def check_nonresonance(report: SpectralReport, j0: int) -> bool:
    """True when beta_j / beta_{j0} is not a positive integer for any j != j0."""
    beta0 = report.beta(j0)
    for j, beta in enumerate(report.betas, start=1):
        if j == j0:
            continue
        ratio = beta / beta0
        if ratio >= 0.5 and abs(ratio - round(ratio)) < 1e-9:
            return False
    return True


def morse_jump(a, lambda0: float, report: SpectralReport, k_max: int = 20) -> int:
    """Change of the mode-1 negative index across the level ``lambda0``.

    The evaluation interval ``[lambda0 (1-eps), lambda0 (1+eps)]`` starts at
    eps = 1e-2 and halves until it isolates ``lambda0`` within the
    resonance set (up to k_max).

    Raises
    ------
    EpsilonUnderflow
        If no admissible eps > 1e-10 exists (clustered resonances).
    """
    a = check_symmetric(a)
    if lambda0 <= 0.0:
        raise ValueError(f"lambda0 must be positive, got {lambda0}")
    lams = resonance_set(report, k_max).values()
    others = lams[np.abs(lams - lambda0) > 1e-9 * lambda0]
    eps = 1e-2
    while True:
        lo, hi = lambda0 * (1.0 - eps), lambda0 * (1.0 + eps)
        if lo > 0.0 and not np.any((others >= lo) & (others <= hi)):
            break
        eps *= 0.5
        if eps < 1e-10:
            raise EpsilonUnderflow(
                f"no isolation interval around {lambda0:.6g} (clustered resonances)"
            )
    return morse_index_negative(t_matrix(a, 1, hi)) - morse_index_negative(t_matrix(a, 1, lo))


def _restricted(report: SpectralReport, j0: int) -> np.ndarray:
    return compress(report.hessian, report.subspaces[j0 - 1])


def _definite(sym: np.ndarray) -> bool:
    w = np.linalg.eigvalsh(sym)
    eps = zero_threshold(w)
    return bool(np.all(w > eps) or np.all(w < -eps))


def check_szulkin_zj(report: SpectralReport, j0: int) -> bool:
    """Signature imbalance of the Hessian on the level's invariant subspace.

    Equivalent to a nonzero mode-1 index jump at lambda = 1/beta_{j0} by
    the classical index theorem for this restriction.
    """
    report.beta(j0)
    c = _restricted(report, j0)
    return morse_index_negative(c) != morse_index_positive(c)


def check_definite_zj(report: SpectralReport, j0: int) -> bool:
    """Definiteness of the Hessian restricted to the level's invariant subspace."""
    report.beta(j0)
    return _definite(_restricted(report, j0))


def check_definite_z(report: SpectralReport) -> bool:
    """Definiteness of the Hessian on the sum of all imaginary-pair subspaces."""
    if not report.betas:
        return False
    stacked = np.hstack(report.subspaces)
    basis = orthonormal_columns(stacked)
    return _definite(compress(report.hessian, basis))


def check_mplus(report: SpectralReport, n: Optional[int] = None) -> bool:
    """Positive-index count criterion: m+(hessian) != N."""
    n = report.n if n is None else n
    return report.m_plus != n


def newtonian_blocks(etas, lam: float):
    """4x4 diagonal blocks of the permuted mode-1 matrix of a second-order system.

    For ``hessian = diag(etas, 1, ..., 1)`` the mode-1 matrix splits, after
    reordering the basis by columns (i, N+i, 2N+i, 3N+i), into one 4x4
    block per eta with characteristic polynomial
    ``((lam*eta + t) (lam + t) - 1)^2``.
    """
    etas = np.asarray(etas, dtype=float).ravel()
    n = etas.size
    a = np.diag(np.concatenate([etas, np.ones(n)]))
    t = t_matrix(a, 1, lam)
    blocks = []
    for i in range(n):
        idx = np.array([i, n + i, 2 * n + i, 3 * n + i])
        blocks.append(t[np.ix_(idx, idx)])
    return blocks


@dataclass(frozen=True)
class BifurcationCandidate:
    """One candidate level lambda0 = 1/beta_{j0} and everything checked for it."""

    j0: int
    beta: float
    multiplicity: int
    lambda0: float
    predicted_period: float
    nonresonant: bool
    morse_jump: Optional[int]
    degree_on_section: Optional[int]
    degree_path: Optional[str]
    degree_reliable: bool
    a7_results: dict
    verdict: str
    theorem_path: Optional[str]
    reasons: tuple
    diagnostics: dict = field(default_factory=dict)

    @property
    def confirmed(self) -> bool:
        return self.verdict.startswith("confirmed")


@dataclass(frozen=True)
class AnalyzeOptions:
    k_max: int = 20
    j0: Optional[int] = None
    variants: tuple = A7_VARIANTS
    seed: int = 0
    require_minimal: bool = False


def _candidate_verdict(nonres, jump, jump_reason, a7, degree_value, degree_reliable):
    reasons = []
    if jump_reason:
        reasons.append(jump_reason)
    szulkin_cert = a7.get("szulkin", False) or a7.get("definite-zj", False)
    certificate = (jump is not None and jump != 0) or (jump is None and szulkin_cert)
    if degree_value is None:
        reasons.append("section degree unavailable; existence chain cannot close")
        return "inconclusive", None, reasons
    if degree_value == 0:
        reasons.append("section degree vanishes; the criteria are silent here")
        return "inconclusive", None, reasons
    if not degree_reliable:
        reasons.append("section degree is heuristic (regular-value path)")
    if certificate and nonres:
        reasons.append("index jump at an isolated, nonresonant level; minimal periods certified")
        return "confirmed", "nonresonant-jump", reasons
    if certificate and a7.get("definite-z", False):
        reasons.append("definite Hessian on the full oscillatory subspace; periods may be non-minimal")
        return "confirmed (period not certified minimal)", "definite-total", reasons
    if certificate and a7.get("mplus", False):
        reasons.append("positive index count differs from N; periods may be non-minimal")
        return "confirmed (period not certified minimal)", "index-count", reasons
    if certificate:
        reasons.append(
            "resonant level; multi-mode jump analysis not implemented and no global criterion applies"
        )
        return "inconclusive", None, reasons
    if jump == 0:
        reasons.append("mode-1 negative index does not change at this level")
        return "rejected", None, reasons
    reasons.append("no index certificate available for this level")
    return "inconclusive", None, reasons


def analyze(
    system: HamiltonianSystem,
    eq: EquilibriumOrbit,
    options: Optional[AnalyzeOptions] = None,
) -> list:
    """Run every candidate level through the full criteria chain.

    Returns one :class:`BifurcationCandidate` per distinct beta (possibly
    filtered by ``options.j0`` / ``options.require_minimal``), ordered by
    decreasing beta.  Sub-check failures downgrade the affected candidate
    to "inconclusive" instead of failing the whole analysis.
    """
    opts = options or AnalyzeOptions()
    report = spectral_report(system, eq)
    if not report.betas:
        return []
    try:
        degree_report = degree_mod.section_degree(system, eq, seed=opts.seed)
    except HambifError as exc:
        degree_report = degree_mod.DegreeReport(
            value=None, path="none", reliable=False, radius=0.0, detail=str(exc)
        )
    nonkernel = report.hessian_eigenvalues[
        np.abs(report.hessian_eigenvalues) > zero_threshold(report.hessian_eigenvalues)
    ]
    shared_diag = {
        "m_plus": report.m_plus,
        "m_minus": report.m_minus,
        "kernel_dim": report.kernel_dim,
        "orbit_dim": eq.orbit_dim,
        "orbit_nondegenerate": report.kernel_dim == eq.orbit_dim,
        "isotropy_trivial": eq.isotropy_trivial,
        "hessian_eigenvalues": [float(v) for v in report.hessian_eigenvalues],
        "nonkernel_eigenvalue_product": float(np.prod(nonkernel)) if nonkernel.size else 0.0,
        "degree_detail": degree_report.detail,
    }
    candidates = []
    for j0 in range(1, len(report.betas) + 1):
        if opts.j0 is not None and j0 != opts.j0:
            continue
        beta = report.beta(j0)
        nonres = check_nonresonance(report, j0)
        if opts.require_minimal and not nonres:
            continue
        lambda0 = 1.0 / beta
        jump = None
        jump_reason = ""
        try:
            jump = morse_jump(report.hessian, lambda0, report, k_max=opts.k_max)
        except HambifError as exc:
            jump_reason = f"morse jump unavailable: {exc}"
        a7 = {}
        if "szulkin" in opts.variants:
            a7["szulkin"] = check_szulkin_zj(report, j0)
        if "definite-zj" in opts.variants:
            a7["definite-zj"] = check_definite_zj(report, j0)
        if "definite-z" in opts.variants:
            a7["definite-z"] = check_definite_z(report)
        if "mplus" in opts.variants:
            a7["mplus"] = check_mplus(report)
        verdict, path, reasons = _candidate_verdict(
            nonres, jump, jump_reason, a7, degree_report.value, degree_report.reliable
        )
        if report.multiplicities[j0 - 1] > 1:
            reasons.append(f"multiplicity > 1 (cluster size {report.multiplicities[j0 - 1]})")
        if not shared_diag["orbit_nondegenerate"]:
            reasons.append("orbit isolatedness unverified (kernel exceeds orbit dimension)")
        candidates.append(
            BifurcationCandidate(
                j0=j0,
                beta=beta,
                multiplicity=report.multiplicities[j0 - 1],
                lambda0=lambda0,
                predicted_period=2.0 * np.pi / beta,
                nonresonant=nonres,
                morse_jump=jump,
                degree_on_section=degree_report.value,
                degree_path=degree_report.path,
                degree_reliable=degree_report.reliable,
                a7_results=a7,
                verdict=verdict,
                theorem_path=path,
                reasons=tuple(reasons),
                diagnostics=dict(shared_diag),
            )
        )
    return candidates
