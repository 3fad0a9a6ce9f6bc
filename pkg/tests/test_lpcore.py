import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from femtoassoc.harness.checks import lp_violations, random_problem
from femtoassoc.lpcore import (
    FEAS_TOL,
    Fixings,
    LPError,
    UnboundedError,
    build_rlp,
    count_fractional,
    simplex,
    solve_rlp,
)
from femtoassoc.model import ServiceTimeProblem


def reference_makespan(problem):
    """RLP optimum from HiGHS on the textbook inequality form."""
    t = problem.t
    M, N = t.shape
    pairs = [(m, n) for n in range(N) for m in range(M) if np.isfinite(t[m, n])]
    c = np.zeros(1 + len(pairs))
    c[0] = 1
    A_eq = np.zeros((N, 1 + len(pairs)))
    A_ub = np.zeros((M, 1 + len(pairs)))
    A_ub[:, 0] = -1
    for j, (m, n) in enumerate(pairs):
        A_eq[n, 1 + j] = 1
        A_ub[m, 1 + j] = t[m, n]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(M), A_eq=A_eq, b_eq=np.ones(N), method="highs")
    assert res.status == 0
    return res.fun


class TestSimplex:
    def test_textbook(self):
        # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
        A = np.array([[1, 0, 1, 0, 0], [0, 2, 0, 1, 0], [3, 2, 0, 0, 1]], dtype=float)
        b = np.array([4, 12, 18], dtype=float)
        c = np.array([-3, -5, 0, 0, 0], dtype=float)
        for rule in ("dantzig", "bland"):
            res = simplex(c, A, b, rule=rule)
            assert res.objective == pytest.approx(-36)
            np.testing.assert_allclose(res.x[:2], [2, 6], atol=1e-12)

    def test_infeasible(self):
        with pytest.raises(LPError):
            simplex(np.zeros(1), np.array([[1.0], [1.0]]), np.array([1.0, 2.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            simplex(np.zeros(3), np.eye(2), np.ones(2))

    def test_unbounded(self):
        with pytest.raises(UnboundedError):
            simplex(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([1.0]))

    def test_degenerate_cycling_example(self):
        # Beale's example cycles under the plain largest-coefficient rule
        c = np.array([-0.75, 150, -0.02, 6, 0, 0, 0])
        A = np.array(
            [
                [0.25, -60, -0.04, 9, 1, 0, 0],
                [0.5, -90, -0.02, 3, 0, 1, 0],
                [0, 0, 1, 0, 0, 0, 1],
            ]
        )
        b = np.array([0.0, 0.0, 1.0])
        for rule in ("dantzig", "bland"):
            res = simplex(c, A, b, basis=[4, 5, 6], rule=rule)
            assert res.objective == pytest.approx(-0.05)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_highs(self, seed):
        rng = np.random.default_rng(seed)
        m, n = rng.integers(1, 5), rng.integers(2, 7)
        A = rng.uniform(0, 1, (m, n))
        b = rng.uniform(0.5, 2, m)
        c = -rng.uniform(0, 1, n)
        ours = simplex(np.concatenate([c, np.zeros(m)]), np.hstack([A, np.eye(m)]), b, rule="bland")
        ref = linprog(c, A_ub=A, b_ub=b, method="highs")
        assert ours.objective == pytest.approx(ref.fun, rel=1e-9, abs=1e-12)


class TestSolveRlp:
    def test_two_bs_one_user(self):
        sol = solve_rlp(ServiceTimeProblem.from_lists([[2], [3]]))
        assert sol.optimal
        assert sol.T == pytest.approx(1.2, abs=1e-9)
        np.testing.assert_allclose(sol.x[:, 0], [0.6, 0.4], atol=1e-12)
        np.testing.assert_allclose(sol.loads(ServiceTimeProblem.from_lists([[2], [3]])), [1.2, 1.2], atol=1e-12)
        assert count_fractional(sol) == 2

    def test_single_candidate(self):
        sol = solve_rlp(ServiceTimeProblem.from_lists([[2.5], [np.inf]]))
        assert sol.T == pytest.approx(2.5)
        np.testing.assert_array_equal(sol.x[:, 0], [1, 0])
        assert count_fractional(sol) == 0

    def test_fully_fixed(self, small_problem):
        sol = solve_rlp(small_problem, Fixings(one={0: 0, 1: 1, 2: 1}))
        assert sol.T == pytest.approx(2.0)
        assert count_fractional(sol) == 0

    def test_contradictory_fixings(self):
        p = ServiceTimeProblem.from_lists([[1, 1], [2, np.inf]])
        assert solve_rlp(p, Fixings(zero={(0, 1)})).status == "infeasible"
        assert solve_rlp(p, Fixings(one={1: 1})).status == "infeasible"

    def test_fixings_disjoint(self):
        with pytest.raises(ValueError):
            Fixings(zero={(0, 1)}, one={1: 0})

    def test_structure(self, small_problem):
        inst = build_rlp(small_problem)
        # every x column hits exactly one assignment row and one load row
        N = small_problem.num_users
        xcols = inst.A[:, 1 : 1 + len(inst.pairs)]
        assert np.all((xcols[:N] != 0).sum(axis=0) == 1)
        assert np.all((xcols[N:] != 0).sum(axis=0) == 1)

    def test_lp_text(self, small_problem):
        text = build_rlp(small_problem).to_lp_text()
        assert text.startswith("\\") and "Minimize" in text and text.rstrip().endswith("End")
        assert text.count("assign_") == 3 and text.count("load_") == 2

    def test_deterministic(self, open_problem):
        a, b = solve_rlp(open_problem), solve_rlp(open_problem)
        assert a.T == b.T and a.x.tobytes() == b.x.tobytes()

    @pytest.mark.parametrize("rule", ["dantzig", "bland"])
    def test_against_highs(self, rule):
        rng = np.random.default_rng(7)
        for trial in range(40):
            closed = 0.5 if trial % 2 else None
            p = random_problem(rng, int(rng.integers(1, 6)), int(rng.integers(1, 30)), closed_prob=closed)
            sol = solve_rlp(p, rule=rule)
            assert sol.T == pytest.approx(reference_makespan(p), rel=1e-9)
            assert lp_violations(p, sol) == 0

    def test_realistic_scale(self, open_problem):
        sol = solve_rlp(open_problem)
        assert sol.T == pytest.approx(reference_makespan(open_problem), rel=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_basic_solution_support(self, seed):
        rng = np.random.default_rng(seed)
        M, N = int(rng.integers(1, 5)), int(rng.integers(1, 15))
        p = random_problem(rng, M, N, closed_prob=0.6 if seed % 2 else None)
        sol = solve_rlp(p)
        assert np.count_nonzero(sol.x > FEAS_TOL) <= M + N
        assert lp_violations(p, sol) == 0
        assert np.all(sol.x <= 1 + FEAS_TOL)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_fixing_never_lowers_objective(self, seed):
        rng = np.random.default_rng(seed)
        p = random_problem(rng, int(rng.integers(2, 4)), int(rng.integers(2, 8)))
        base = solve_rlp(p)
        n = int(rng.integers(p.num_users))
        m = int(rng.integers(p.num_bs))
        assert solve_rlp(p, Fixings(one={n: m})).T >= base.T - 1e-12 * base.T
        fixed0 = solve_rlp(p, Fixings(zero={(m, n)}))
        assert fixed0.T >= base.T - 1e-12 * base.T
