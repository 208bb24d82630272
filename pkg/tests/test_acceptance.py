"""Exit criteria.

Every test is named ``test_criterion_<N>_...``; the conftest summary folds
them into one PASS/FAIL line per criterion. Runtime limits are asserted
against the wall time accumulated by all tests of a criterion.
"""
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from krylovsvd.bounds import (
    bound_value,
    budget_gap_dependent,
    budget_lanczos_random,
    budget_lanczos_warm,
    budget_power_gap_independent,
    lanczos_angle_degree,
    required_rate,
    verify,
)
from krylovsvd.chebyshev import ChebParams, apply_filter_block, phi, tail_bound
from krylovsvd.harness import campaign as cp
from krylovsvd.harness.spectra import random_orthogonal
from krylovsvd.linalg import (
    project_onto_range,
    rank_k_project_F,
    spectral_norm,
    svd_reference,
)
from krylovsvd.randinit import (
    construct_Z,
    failure_probability,
    gaussian_matrix,
    initialization_bound,
    initialize,
    tan_angle_kdim,
)
from krylovsvd.solvers import block_krylov, build_krylov, extract_rank_k, power_iterate, randomized_svd
import oracles

pytestmark = pytest.mark.acceptance

_elapsed = {}


@contextmanager
def timed(criterion):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        _elapsed[criterion] = _elapsed.get(criterion, 0.0) + time.perf_counter() - t0


def _assert_runtime(criterion, limit):
    assert _elapsed.get(criterion, 0.0) < limit, (
        f"criterion {criterion} took {_elapsed[criterion]:.1f}s (limit {limit}s)")


def _le(lhs, rhs, headroom):
    """``lhs <= rhs`` up to ``headroom`` relative to the larger magnitude."""
    return lhs <= rhs + headroom * max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------------------
# 1. Chebyshev filter properties
# ---------------------------------------------------------------------------

GRID = [(g, d) for g in (0.1, 0.5, 1.0) for d in (2, 5, 10, 20)]
ALPHAS = (1e-3, 1.0, 37.0)


@pytest.mark.parametrize("gamma, d", GRID)
def test_criterion_1_phi_sign_and_growth(gamma, d):
    with timed(1):
        for alpha in ALPHAS:
            prm = ChebParams(alpha, gamma, d)
            assert phi(0.0, prm) == 0.0                                   # (i)
            above = np.linspace(alpha, 10 * (1 + gamma) * alpha, 1000)
            assert all(phi(x, prm) > 0.0 for x in above)                  # (ii)
            edge = (1 + gamma) * alpha
            beyond = np.linspace(edge, 10 * edge, 1001)[1:]
            assert all(phi(x, prm) > x for x in beyond)                   # (iii), x > edge
            # at x = (1+gamma) alpha the filter equals x exactly
            assert phi(edge, prm) == pytest.approx(edge, rel=1e-12)


@pytest.mark.parametrize("gamma, d", GRID)
def test_criterion_1_phi_tail_bound_grid(gamma, d):
    with timed(1):
        for alpha in ALPHAS:
            prm = ChebParams(alpha, gamma, d)
            bound = tail_bound(prm)
            xs = np.linspace(0.0, alpha, 1000)
            worst = max(abs(phi(x, prm)) for x in xs)
            assert _le(worst, bound, 1e-12)                               # (iv)


def test_criterion_1_filter_range_containment():
    rng = np.random.default_rng(101)
    with timed(1):
        for i in range(20):
            m, n = rng.integers(6, 25, size=2)
            p = int(rng.integers(1, 4))
            d = int(rng.integers(2, 6))
            M = rng.standard_normal((m, n))
            X = rng.standard_normal((m, p))
            lam = np.linalg.svd(M, compute_uv=False) ** 2
            alpha = float(lam[min(len(lam) - 1, 2)]) / 1.5
            prm = ChebParams(alpha, float(rng.uniform(0.05, 1.0)), d)
            Y = apply_filter_block(M, X, prm)
            Q = block_krylov(M, X, d).Q                                   # K = [X, AX, ..., A^d X]
            resid = np.linalg.norm(Y - Q @ (Q.T @ Y)) / np.linalg.norm(Y)
            assert resid <= 1e-7, f"instance {i}: residual {resid:.2e}"   # (v)
            if m <= n:
                # nonsingular A = M M^T: the polynomial is the matrix function phi(A)
                w, U = np.linalg.eigh(M @ M.T)
                exact = U @ (np.array([phi(x, prm) for x in w])[:, None] * (U.T @ X))
                np.testing.assert_allclose(Y, exact, rtol=1e-6, atol=1e-9 * np.abs(exact).max())


def test_criterion_1_runtime():
    _assert_runtime(1, 5.0)


# ---------------------------------------------------------------------------
# 2. Initialization bound
# ---------------------------------------------------------------------------

INIT_CONFIGS = [(100, 25, 5, 2.0), (200, 40, 10, 1.5), (500, 60, 20, 2.0)]


@pytest.fixture(scope="module")
def init_trials():
    out = {}
    with timed(2):
        for cfg in INIT_CONFIGS:
            n, p, k, alpha = cfg
            U = random_orthogonal(n, 7 + n)
            reports = [initialize(U, n, p, k, alpha, seed=x)
                       for x, _ in cp.trial_seeds(2024 + n, 200)]
            out[cfg] = (U, reports)
    return out


@pytest.mark.parametrize("cfg", INIT_CONFIGS, ids=lambda c: "n{}-p{}-k{}".format(*c[:3]))
def test_criterion_2_initialization_bound_rate(init_trials, cfg):
    n, p, k, alpha = cfg
    _, reports = init_trials[cfg]
    bound = initialization_bound(n, p, k, alpha)
    rate = np.mean([r.tan_theta_XZ <= bound for r in reports])
    need = required_rate(1.0 - failure_probability(alpha), len(reports))
    assert rate >= need, (
        f"pass rate {rate:.3f} < required {need:.3f}; "
        f"median tan {np.median([r.tan_theta_XZ for r in reports]):.1f} vs bound {bound:.2f}")


@pytest.mark.parametrize("cfg", INIT_CONFIGS, ids=lambda c: "n{}-p{}-k{}".format(*c[:3]))
def test_criterion_2_nullspace_property(init_trials, cfg):
    _, reports = init_trials[cfg]
    assert max(r.nullspace_residual for r in reports) <= 1e-9


def test_criterion_2_runtime(init_trials):
    _assert_runtime(2, 60.0)


def test_initialization_angles_match_lapack(init_trials):
    # the measured tangents are right; the miss in criterion 2 is not a numerical artifact
    U, reports = init_trials[INIT_CONFIGS[0]]
    k = INIT_CONFIGS[0][2]
    for r in reports[:40]:
        ref = oracles.principal_tangents(U[:, :k], r.X @ r.Z).max()
        assert r.tan_theta_XZ == pytest.approx(ref, rel=1e-7)


def test_initialization_gaussian_factor_estimates(init_trials):
    # the two random-matrix norm estimates the bound is assembled from do hold
    n, p, k, alpha = INIT_CONFIGS[0]
    U, reports = init_trials[INIT_CONFIGS[0]]
    q = 1.0 - failure_probability(alpha)
    tail_ok = np.mean([spectral_norm(U[:, p:].T @ r.X) <= math.sqrt(n - p) + math.sqrt(p) + alpha
                       for r in reports])
    head_ok = np.mean([svd_reference(U[:, :k].T @ r.X).sigma[-1] >= math.sqrt(p) - math.sqrt(k) - alpha
                       for r in reports])
    assert tail_ok >= q and head_ok >= q


# ---------------------------------------------------------------------------
# 3 / 4. Gap-independent bounds
# ---------------------------------------------------------------------------

GAP_FREE = dict(m=100, n=80, k=5, p=25, alpha=2.0, trials=200, slack=1e-6,
                spectrum={"kind": "geometric", "ratio": 0.9})


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_criterion_3_lanczos_random_start(eps):
    with timed(3):
        cfg = dict(GAP_FREE, campaign="lanczos-random", epsilon=eps, seed=31)
        report = cp.run_campaign(cfg)
    d = budget_lanczos_random(80, 25, 5, eps, 2.0).count
    assert all(t.budget == d for t in report.trials)
    assert report.pass_rate >= 0.70, f"pass rate {report.pass_rate:.3f}"


def test_criterion_3_runtime():
    _assert_runtime(3, 300.0)


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_criterion_4_power_random_start(eps):
    with timed(4):
        cfg = dict(GAP_FREE, campaign="power-random", epsilon=eps, seed=41)
        report = cp.run_campaign(cfg)
    t = budget_power_gap_independent(80, 25, 5, eps, 2.0).count
    assert all(r.budget == t for r in report.trials)
    assert report.pass_rate >= 0.70, f"pass rate {report.pass_rate:.3f}"


@pytest.mark.parametrize("eps", [0.25, 0.5])
def test_criterion_4_krylov_dominates_power(eps):
    with timed(4):
        cfg = cp.CampaignConfig.from_mapping(dict(GAP_FREE, campaign="lanczos-random",
                                                  epsilon=eps, seed=43))
        d = budget_lanczos_random(80, 25, 5, eps, 2.0).count
        wins = 0
        for x_seed, m_seed in cp.trial_seeds(cfg.seed, cfg.trials):
            M = cp.synth_factors(cfg.spectrum_spec(m_seed))[0]
            X = gaussian_matrix(80, 25, x_seed)
            lan = extract_rank_k(M, build_krylov(M, X, d).Q, 5).spectral_err_sq
            pw = extract_rank_k(M, power_iterate(M, X, d), 5).spectral_err_sq
            wins += lan <= pw + 1e-9
    assert wins >= 0.95 * cfg.trials, f"{wins}/{cfg.trials}"


def test_criterion_4_runtime():
    _assert_runtime(4, 300.0)


# ---------------------------------------------------------------------------
# 5. Gap-dependent angle contraction on diagonal operators
# ---------------------------------------------------------------------------

def _diagonal_operator(ratio, n=60, p=12, k=4):
    """sqrt of eigenvalues with lambda_{p+1} = 1 and lambda_k = ratio."""
    lam = np.empty(n)
    lam[:k] = ratio * (1.0 + 0.1 * np.arange(k, 0, -1) - 0.1)
    lam[k:p] = np.linspace(ratio, 1.0, p - k + 2)[1:-1]
    lam[p:] = 0.97 ** np.arange(n - p)
    assert lam[k - 1] == ratio and lam[p] == 1.0
    return np.diag(np.sqrt(lam)), lam


@pytest.mark.parametrize("ratio", [1.5, 2.0, 4.0])
def test_criterion_5_power_contraction(ratio):
    n, p, k = 60, 12, 4
    with timed(5):
        M, lam = _diagonal_operator(ratio)
        I = np.eye(n)
        for seed in range(5):
            X = gaussian_matrix(n, p, 500 + seed)
            XZ = X @ construct_Z(I, X, k)
            tan0 = tan_angle_kdim(I[:, :k], XZ)
            for t in range(1, 11):
                tan_t = tan_angle_kdim(I[:, :k], (lam ** t)[:, None] * XZ)
                assert tan_t <= (1.0 / ratio) ** t * tan0 * (1 + 1e-6), (seed, t)


@pytest.mark.parametrize("ratio", [1.5, 2.0, 4.0])
@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_criterion_5_chebyshev_contraction(ratio, eps):
    n, p, k = 60, 12, 4
    with timed(5):
        M, lam = _diagonal_operator(ratio)
        I = np.eye(n)
        d = math.ceil(lanczos_angle_degree(ratio, eps))
        prm = ChebParams(alpha=1.0, gamma=ratio - 1.0, degree=d)
        for seed in range(5):
            X = gaussian_matrix(n, p, 700 + seed)
            XZ = X @ construct_Z(I, X, k)
            tan0 = tan_angle_kdim(I[:, :k], XZ)
            tan_d = tan_angle_kdim(I[:, :k], apply_filter_block(M, XZ, prm))
            assert tan_d <= eps * tan0 * (1 + 1e-6), (seed, d)


def test_criterion_5_runtime():
    _assert_runtime(5, 30.0)


# ---------------------------------------------------------------------------
# 6. Gap-dependent norm bound
# ---------------------------------------------------------------------------

def test_criterion_6_gap_dependent_norm_bound():
    cfg = dict(campaign="gap-dependent", method="both", m=200, n=200, k=10, p=40,
               epsilon=0.1, alpha=2.0, trials=200, seed=61, norm="both", slack=1e-6,
               spectrum={"kind": "step", "gap_position": 10, "gap_ratio": 2.0})
    with timed(6):
        report = cp.run_campaign(cfg)
    sigma = np.where(np.arange(1, 201) <= 10, 1.0, 0.5)
    for method in ("power", "lanczos"):
        b = budget_gap_dependent(1.0, 0.5, 200, 40, 10, 0.1, 2.0, method=method, target="norm")
        recs = [t for t in report.trials if t.method == method]
        assert len(recs) == 200 and all(t.budget == b.count for t in recs)
        assert all(t.bound == pytest.approx(bound_value("random", sigma, 10, 40, 0.1)) for t in recs)
        assert all(t.bound_frobenius == pytest.approx(bound_value("frobenius", sigma, 10, 40, 0.1))
                   for t in recs)
        rate = np.mean([t.verdict for t in recs])
        assert rate >= report.required_rate, (method, rate)
    assert report.required_rate == pytest.approx(required_rate(1 - 2 * math.exp(-2), 200))
    assert report.overall_pass


def test_criterion_6_runtime():
    _assert_runtime(6, 300.0)


# ---------------------------------------------------------------------------
# 7. Appendix inequality suites
# ---------------------------------------------------------------------------

HEADROOM = 1e-9


def _orth(rng, rows, cols):
    Q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return Q


def _projector(rng, m):
    Q = _orth(rng, m, int(rng.integers(1, m)))
    return Q @ Q.T


def _chebyshev_f(alpha, gamma, d):
    prm = ChebParams(alpha, gamma, d)
    return lambda x: phi(x, prm)


def _monomial_f(alpha, gamma, t):
    c = (1.0 + gamma) * alpha
    return lambda x: c * (x / c) ** t if x > 0 else 0.0


def _filters(rng, alpha, gamma):
    return [_chebyshev_f(alpha, gamma, int(rng.integers(2, 9))),
            _monomial_f(alpha, gamma, int(rng.integers(2, 6)))]


def _gram_filter(U, s, f):
    """f(M_j M_j^T) from the exact left factor and the kept singular values."""
    return (U * np.array([f(x * x) for x in s])) @ U.T


def _instance(rng, m, n, sigma):
    U = _orth(rng, m, m)
    V = _orth(rng, n, n)
    r = len(sigma)
    return (U[:, :r] * sigma) @ V[:, :r].T, U, V


def test_criterion_7_projector_contraction():
    rng = np.random.default_rng(71)
    with timed(7):
        for _ in range(30):
            m, n = rng.integers(6, 16, size=2)
            q = min(m, n)
            k = int(rng.integers(1, q))
            r = int(rng.integers(k, q + 1))
            alpha, gamma = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.05, 1.0))
            head = (1 + gamma) * alpha * (1 + rng.exponential(0.5, k))
            head[-1] = (1 + gamma) * alpha * rng.choice([1.0, 1.0 + rng.uniform(0, 0.1)])
            mid = rng.uniform(alpha, (1 + gamma) * alpha, r - k)
            tail = rng.uniform(0, alpha, q - r)
            sq = np.sort(np.concatenate([head, mid, tail]))[::-1]
            M, U, _ = _instance(rng, m, n, np.sqrt(sq))
            s = np.sqrt(sq)
            P = _projector(rng, m)
            Mk = U[:, :k] @ (U[:, :k].T @ M)
            lhs = spectral_norm(P @ Mk) ** 2
            for f in _filters(rng, alpha, gamma):
                mid_term = spectral_norm(P @ _gram_filter(U[:, :k], s[:k], f) @ P)
                right = spectral_norm(P @ _gram_filter(U[:, :r], s[:r], f) @ P)
                assert _le(lhs, mid_term, HEADROOM)
                assert _le(mid_term, right, HEADROOM)


def test_criterion_7_lanczos_projector_bound():
    rng = np.random.default_rng(72)
    with timed(7):
        for _ in range(30):
            m, n = rng.integers(6, 16, size=2)
            q = min(m, n)
            k = int(rng.integers(1, q))
            alpha, gamma = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.05, 1.0))
            sq = np.concatenate([alpha * (1 + rng.exponential(1.0, k)),
                                 rng.uniform(0, 3 * alpha, q - k)])
            sq = np.sort(sq)[::-1]
            while sq[k - 1] < alpha:
                sq[k - 1] = alpha
                sq = np.sort(sq)[::-1]
            s = np.sqrt(sq)
            M, U, _ = _instance(rng, m, n, s)
            T = _projector(rng, m)
            lhs = spectral_norm(T @ M) ** 2
            for f in _filters(rng, alpha, gamma):
                rhs = (spectral_norm(T @ _gram_filter(U[:, :k], s[:k], f))
                       + max(sq[k] if k < q else 0.0, (1 + gamma) * alpha))
                assert _le(lhs, rhs, HEADROOM)


def _split_rows(rng, m, V_blocks):
    """M_i = G_i V_i^T with arbitrary left factors; row spaces mutually orthogonal."""
    parts = [rng.standard_normal((m, Vb.shape[1])) * rng.uniform(0.1, 3.0) @ Vb.T
             if Vb.shape[1] else np.zeros((m, Vb.shape[0])) for Vb in V_blocks]
    return parts


def _norms(A):
    return {"2": spectral_norm(A), "F": np.linalg.norm(A)}


def test_criterion_7_angle_to_norm_two_blocks():
    rng = np.random.default_rng(73)
    with timed(7):
        for i in range(30):
            m, n = int(rng.integers(8, 20)), int(rng.integers(8, 20))
            k = int(rng.integers(1, 5))
            p = k if i % 3 == 0 else int(rng.integers(k, min(n, k + 6) + 1))
            V = random_orthogonal(n, 7300 + i)
            M1, M2 = _split_rows(rng, m, [V[:, :k], V[:, k:]])
            M = M1 + M2
            X = rng.standard_normal((n, p))
            # any orthonormal Z with rank(XZ) = k; p == k gives Z = I and tan_k(V1, X) itself
            Z = np.eye(k) if p == k else _orth(rng, p, k)
            tan = tan_angle_kdim(V[:, :k], X @ Z)
            if p == k:
                assert tan == pytest.approx(oracles.principal_tangents(V[:, :k], X).max(), rel=1e-7)
            C = M @ X @ Z
            err1 = _norms(M1 - project_onto_range(C, M1))
            errM = _norms(M - project_onto_range(C, M))
            n2 = _norms(M2)
            for xi in ("2", "F"):
                assert _le(err1[xi], tan * n2[xi], HEADROOM), (i, xi)
                assert _le(errM[xi] ** 2, (1 + tan * tan) * n2[xi] ** 2, HEADROOM), (i, xi)


def test_criterion_7_angle_to_norm_three_blocks():
    rng = np.random.default_rng(74)
    with timed(7):
        for i in range(30):
            m, n = int(rng.integers(8, 20)), int(rng.integers(10, 20))
            k = int(rng.integers(1, 4))
            p = int(rng.integers(k + 1, min(n - 1, k + 6) + 1))
            V = random_orthogonal(n, 7400 + i)
            M1, M2, M3 = _split_rows(rng, m, [V[:, :k], V[:, k:p], V[:, p:]])
            M = M1 + M2 + M3
            X = rng.standard_normal((n, p))
            Z = construct_Z(V, X, k)
            assert np.max(np.abs(V[:, k:p].T @ X @ Z)) <= 1e-9
            tan = tan_angle_kdim(V[:, :k], X @ Z)
            C = M @ X @ Z
            err1 = _norms(M1 - project_onto_range(C, M1))
            errM = _norms(M - project_onto_range(C, M))
            n3, n23 = _norms(M3), _norms(M2 + M3)
            for xi in ("2", "F"):
                assert _le(err1[xi] ** 2, tan * tan * n3[xi] ** 2, HEADROOM), (i, xi)
                assert _le(errM[xi] ** 2, n23[xi] ** 2 + tan * tan * n3[xi] ** 2, HEADROOM), (i, xi)


def test_criterion_7_sketch_projection_variant():
    rng = np.random.default_rng(75)
    with timed(7):
        for i in range(30):
            m, n = int(rng.integers(6, 18)), int(rng.integers(6, 18))
            k = int(rng.integers(1, min(m, n)))
            p = int(rng.integers(k, n + 1))
            M1 = rng.standard_normal((m, k)) @ rng.standard_normal((k, n))
            M2 = rng.standard_normal((m, n)) * rng.uniform(0.01, 2.0)
            M = M1 + M2
            X = rng.standard_normal((n, p))
            V1 = svd_reference(M1).V[:, :k]
            C = M @ X
            Qc = np.linalg.qr(C)[0][:, :np.linalg.matrix_rank(C)]
            # rank(M1) = k, so the rank-k best approximation within range(C) is C C^+ M1
            best_F = M1 - rank_k_project_F(Qc, M1, min(k, Qc.shape[1]))
            best = M1 - project_onto_range(C, M1)
            np.testing.assert_allclose(best_F, best, atol=1e-9 * np.linalg.norm(M1))
            rhs = _norms(M2 @ X @ np.linalg.pinv(V1.T @ X))
            lhs = _norms(best)
            for xi in ("2", "F"):
                assert _le(lhs[xi] ** 2, rhs[xi] ** 2, HEADROOM), (i, xi)


def test_criterion_7_runtime():
    _assert_runtime(7, 60.0)


# ---------------------------------------------------------------------------
# 8. Oracle equivalence
# ---------------------------------------------------------------------------

def test_criterion_8_oracle_equivalence():
    rng = np.random.default_rng(81)
    with timed(8):
        for i in range(50):
            m, n = int(rng.integers(2, 61)), int(rng.integers(2, 51))
            q = min(m, n)
            rank = q if i % 2 == 0 else int(rng.integers(1, q + 1))
            M = rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n))
            ref = svd_reference(M)
            np.testing.assert_allclose(ref.sigma, oracles.lapack_sigma(M), atol=1e-12 * ref.sigma[0])
            s1 = ref.sigma[0] ** 2
            for k in range(1, min(10, rank) + 1):
                target = spectral_norm(M - (ref.U[:, :k] * ref.sigma[:k]) @ ref.V[:, :k].T) ** 2
                for method in ("power", "lanczos"):
                    res = randomized_svd(M, k, rank, method=method, budget=3, seed=i)
                    assert abs(res.spectral_err_sq - target) <= 1e-8 * s1, (i, k, method)


def test_criterion_8_runtime():
    _assert_runtime(8, 60.0)


# ---------------------------------------------------------------------------
# 9. Budget formula regression
# ---------------------------------------------------------------------------

def test_criterion_9_budget_regression():
    cases = [
        (budget_lanczos_random(1000, 20, 10, 0.1, 1).count,
         oracles.mp_ceil(oracles.mp_lanczos_random(1000, 20, 10, 0.1, 1)), 57),
        (budget_power_gap_independent(100, 25, 5, 0.5, 2).count,
         oracles.mp_ceil(oracles.mp_power_gap_independent(100, 25, 5, 0.5, 2)), 12),
        (budget_gap_dependent(2.0, 1.0, 100, 25, 5, 0.1, 2).count,
         oracles.mp_ceil(oracles.mp_power_gap_dependent_angle(2, 100, 25, 5, 0.1, 2)), 4),
        (budget_lanczos_warm(1, 1).count, oracles.mp_ceil(oracles.mp_lanczos_warm(1, 1)), 3),
        (budget_lanczos_warm(8, 0.5).count, oracles.mp_ceil(oracles.mp_lanczos_warm(8, 0.5)), 12),
    ]
    for got, oracle, frozen in cases:
        assert got == oracle == frozen
    b = initialization_bound(100, 25, 5, 2)
    assert round(b, 3) == round(float(oracles.mp_init_bound(100, 25, 5, 2)), 3) == 20.5
    assert bound_value("random", [5.0, 4.0, 3.0, 2.0, 1.0], 2, 3, 0.5) == 11.0
    assert verify(11.0, bound_value("random", [5.0, 4.0, 3.0, 2.0, 1.0], 2, 3, 0.5)).passed
