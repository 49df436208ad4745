import numpy as np
import pytest

from hambif import analysis, linalg, model
from hambif.errors import NoImaginaryPairs


def random_definite_matrix(rng, two_n, low=0.5, high=2.5):
    # controlled positive spectrum -> J A has purely imaginary spectrum
    q, _ = np.linalg.qr(rng.standard_normal((two_n, two_n)))
    return q @ np.diag(rng.uniform(low, high, size=two_n)) @ q.T


def test_t_matrix_frozen_2x2_case():
    t = analysis.t_matrix(np.eye(2), 1, 1.0)
    expected = np.array(
        [
            [-1.0, 0.0, 0.0, -1.0],
            [0.0, -1.0, 1.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
            [-1.0, 0.0, 0.0, -1.0],
        ]
    )
    assert np.array_equal(t, expected)
    assert abs(np.linalg.det(t)) < 1e-14
    assert np.array_equal(t[0], t[3])  # rows coincide, singular by construction


def test_t_matrix_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(10):
        two_n = int(rng.choice([2, 4, 6]))
        a = rng.standard_normal((two_n, two_n))
        a = 0.5 * (a + a.T)
        t = analysis.t_matrix(a, int(rng.integers(1, 6)), float(rng.uniform(0.1, 3.0)))
        assert np.array_equal(t, t.T)


def test_t_matrix_small_lambda_morse_index():
    rng = np.random.default_rng(1)
    for two_n in (2, 4, 6):
        a = rng.standard_normal((two_n, two_n))
        a = 0.5 * (a + a.T)
        t = analysis.t_matrix(a, 3, 1e-9)
        assert linalg.morse_index_negative(t) == two_n


def test_spectral_report_harmonic():
    sys = model.preset("harmonic", beta=1.0)
    eq = model.refine_equilibrium(sys, np.array([0.2, -0.1]))
    rep = analysis.spectral_report(sys, eq)
    assert len(rep.betas) == 1
    assert abs(rep.betas[0] - 1.0) < 1e-10
    assert rep.m_plus == 2
    assert rep.kernel_dim == 0


def test_spectral_report_satellite():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    eq = model.refine_equilibrium(sat, np.array([1.0, 0, 0, 0, -1.0, 0.0]))
    rep = analysis.spectral_report(sat, eq)
    assert rep.kernel_dim == 1
    w = np.sort(rep.hessian_eigenvalues)
    assert min(abs(w - 1.0)) < 1e-10
    assert min(abs(w - 2.0)) < 1e-10  # 1 + omega^2
    assert rep.m_plus in (2, 4)
    assert len(rep.betas) == 2 and rep.betas[0] > rep.betas[1]


def test_resonance_set_merges_contributors():
    rep = analysis.matrix_report(np.diag([4.0, 1.0, 1.0, 1.0]))  # betas 2, 1
    assert np.allclose(rep.betas, [2.0, 1.0], atol=1e-12)
    rs = analysis.resonance_set(rep, k_max=3)
    assert np.allclose(rs.values(), [0.5, 1.0, 1.5, 2.0, 3.0], atol=1e-9)
    merged = rs.entries[1]
    assert set(merged.contributors) == {(2, 1), (1, 2)}


def test_resonance_set_single_beta():
    rep = analysis.matrix_report(np.eye(2))
    rs = analysis.resonance_set(rep, k_max=2)
    assert np.allclose(rs.values(), [1.0, 2.0], atol=1e-12)


def test_resonance_set_requires_imaginary_pairs():
    rep = analysis.matrix_report(np.diag([1.0, -1.0]))
    assert rep.betas == ()
    with pytest.raises(NoImaginaryPairs):
        analysis.resonance_set(rep, k_max=3)


def test_resonance_singularity_cross_check():
    rng = np.random.default_rng(4)
    rep = analysis.matrix_report(random_definite_matrix(rng, 4))
    rs = analysis.resonance_set(rep, k_max=4)
    for level in rs.entries:
        k = level.contributors[0][0]
        t = analysis.t_matrix(rep.hessian, k, level.lam)
        assert np.min(np.abs(np.linalg.eigvalsh(t))) < 1e-10
    lam_values = rs.values()
    probe = 0.5 * (lam_values[0] + lam_values[1])
    if np.min(np.abs(lam_values - probe)) > 1e-3:
        for k in range(1, 5):
            t = analysis.t_matrix(rep.hessian, k, probe)
            assert np.min(np.abs(np.linalg.eigvalsh(t))) > 1e-6


def test_nonresonance_checks():
    rep = analysis.matrix_report(np.diag([9.0, 4.0, 1.0, 1.0]))  # betas 3, 2
    assert np.allclose(rep.betas, [3.0, 2.0], atol=1e-12)
    assert analysis.check_nonresonance(rep, 2)  # 3/2 not an integer
    assert analysis.check_nonresonance(rep, 1)  # largest beta always passes

    rep2 = analysis.matrix_report(np.diag([4.0, 1.0, 1.0, 1.0]))  # betas 2, 1
    assert not analysis.check_nonresonance(rep2, 2)  # 2/1 = 2
    assert analysis.check_nonresonance(rep2, 1)


def test_morse_jump_harmonic():
    rep = analysis.matrix_report(np.eye(2))
    jump = analysis.morse_jump(np.eye(2), 1.0, rep)
    assert abs(jump) == 2
    # explicit two-sided eigenvalue oracle: eigenvalues of T are -lam +/- 1, double
    for lam, expected in [(0.9, 2), (1.1, 4)]:
        t = analysis.t_matrix(np.eye(2), 1, lam)
        assert linalg.morse_index_negative(t) == expected
    assert jump == 4 - 2


def test_morse_jump_newtonian_blocks():
    # simple positive stiffness eigenvalue eta -> jump 2 * multiplicity
    for etas, beta, expected in [
        ([2.0, 0.3], np.sqrt(2.0), 2),
        ([2.0, 2.0, 0.3], np.sqrt(2.0), 4),
    ]:
        n = len(etas)
        a = np.diag(np.concatenate([np.asarray(etas), np.ones(n)]))
        rep = analysis.matrix_report(a)
        assert analysis.morse_jump(a, 1.0 / beta, rep) == expected


def test_morse_jump_away_from_levels():
    rep = analysis.matrix_report(np.eye(2))
    assert analysis.morse_jump(np.eye(2), 0.7, rep) == 0


def test_newtonian_block_polynomial():
    rng = np.random.default_rng(9)
    for _ in range(10):
        eta = float(rng.uniform(0.2, 3.0))
        lam = float(rng.uniform(0.2, 3.0))
        block = analysis.newtonian_blocks([eta], lam)[0]
        quad = np.array([1.0, lam * (1.0 + eta), lam**2 * eta - 1.0])
        expected = np.convolve(quad, quad)
        assert np.max(np.abs(np.poly(block) - expected)) < 1e-10


def test_szulkin_definite_and_indefinite():
    # positive definite restriction -> signature imbalance holds
    rep = analysis.matrix_report(np.eye(2))
    assert analysis.check_szulkin_zj(rep, 1)
    assert analysis.check_definite_zj(rep, 1)
    # signature (1,1) on a multiplicity-2 cluster -> no imbalance, no jump
    a = np.diag([1.0, -1.0, 1.0, -1.0])
    rep2 = analysis.matrix_report(a)
    assert rep2.betas == (1.0,)
    assert rep2.multiplicities == (2,)
    assert not analysis.check_szulkin_zj(rep2, 1)
    assert not analysis.check_definite_zj(rep2, 1)
    assert analysis.morse_jump(a, 1.0, rep2) == 0


def test_szulkin_agrees_with_jump_on_random_matrices():
    rng = np.random.default_rng(12)
    done = 0
    while done < 10:
        two_n = int(rng.choice([2, 4, 6]))
        a = random_definite_matrix(rng, two_n) * float(rng.choice([1.0, -1.0]))
        rep = analysis.matrix_report(a)
        if not rep.betas or max(rep.multiplicities) > 1:
            continue
        for j, beta in enumerate(rep.betas, start=1):
            jump = analysis.morse_jump(a, 1.0 / beta, rep)
            assert analysis.check_szulkin_zj(rep, j) == (jump != 0)
        done += 1


def test_check_definite_z_and_mplus():
    rep = analysis.matrix_report(np.diag([1.0, 4.0, 1.0, 1.0]))
    assert analysis.check_definite_z(rep)
    assert rep.m_plus == 4 and rep.n == 2
    assert analysis.check_mplus(rep)
    rep2 = analysis.matrix_report(np.diag([1.0, -1.0, 1.0, -1.0]))
    assert not analysis.check_definite_z(rep2)
    assert not analysis.check_mplus(rep2)  # m+ = 2 = N


def test_analyze_satellite_confirms():
    sat = model.preset("satellite", omega=1.0, c=0.1)
    eq = model.refine_equilibrium(sat, np.array([1.0, 0, 0, 0, -1.0, 0.0]))
    cands = analysis.analyze(sat, eq)
    assert len(cands) == 2
    assert any(c.confirmed for c in cands)
    top = cands[0]
    assert top.a7_results["mplus"]
    assert top.degree_on_section in (-1, 1)
    assert abs(top.predicted_period * top.beta - 2.0 * np.pi) < 1e-12 * 2.0 * np.pi
    assert top.diagnostics["orbit_nondegenerate"]


def test_analyze_coupled_springs_paths():
    sys = model.preset("coupled-springs", frequencies=[1.0, 2.0])
    eq = model.refine_equilibrium(sys, 0.05 * np.ones(4))
    cands = analysis.analyze(sys, eq)
    assert len(cands) == 2
    first = cands[0]  # beta = 2, nonresonant
    assert abs(first.beta - 2.0) < 1e-7
    assert first.verdict == "confirmed"
    assert abs(first.predicted_period - np.pi) < 1e-7
    assert first.morse_jump == 2
    second = cands[1]  # beta = 1, resonant against beta = 2
    assert not second.nonresonant
    assert second.verdict == "confirmed (period not certified minimal)"
    assert second.theorem_path == "definite-total"


def test_analyze_no_imaginary_pairs_empty():
    sys = model.HamiltonianSystem(
        n=1,
        energy=lambda z: 0.5 * (z[0] ** 2 - z[1] ** 2),
        gradient=lambda z: np.array([z[0], -z[1]]),
        hessian=lambda z: np.diag([1.0, -1.0]),
    )
    eq = model.refine_equilibrium(sys, np.array([0.3, 0.2]))
    assert analysis.analyze(sys, eq) == []


def test_analyze_j0_filter_and_minimal_gate():
    sys = model.preset("coupled-springs", frequencies=[1.0, 2.0])
    eq = model.refine_equilibrium(sys, 0.05 * np.ones(4))
    only_second = analysis.analyze(sys, eq, analysis.AnalyzeOptions(j0=2))
    assert len(only_second) == 1 and only_second[0].j0 == 2
    minimal = analysis.analyze(sys, eq, analysis.AnalyzeOptions(require_minimal=True))
    assert [c.j0 for c in minimal] == [1]


def test_morse_limits_random():
    rng = np.random.default_rng(21)
    for two_n in (2, 4, 6):
        a = random_definite_matrix(rng, two_n) * float(rng.choice([1.0, -1.0]))
        rep = analysis.matrix_report(a)
        if not rep.betas:
            continue
        lams = analysis.resonance_set(rep, k_max=1).values()
        below = analysis.t_matrix(a, 1, 0.5 * lams.min())
        above = analysis.t_matrix(a, 1, 2.0 * lams.max())
        assert linalg.morse_index_negative(below) == two_n
        assert linalg.morse_index_negative(above) == 2 * rep.m_plus
