#include "greydea/lp.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "greydea/errors.hpp"
#include "lp_oracle.hpp"

using namespace greydea;
using greydea::testing::oracle_solve;

namespace {

LpProblem make_lp(LpSense sense, std::vector<double> cost,
                  std::vector<std::vector<double>> rows, std::vector<double> rhs) {
    LpProblem p;
    p.sense = sense;
    const int n = static_cast<int>(cost.size());
    const int m = static_cast<int>(rhs.size());
    p.cost = Eigen::Map<Eigen::VectorXd>(cost.data(), n);
    p.eq_rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), m);
    p.eq_matrix.resize(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) p.eq_matrix(i, j) = rows[i][j];
    }
    return p;
}

LpProblem random_lp(std::mt19937& rng, int max_vars, int max_cons) {
    std::uniform_int_distribution<int> nd(1, max_vars), md(1, max_cons), coef(-5, 5);
    const int n = nd(rng);
    const int m = md(rng);
    LpProblem p;
    p.sense = LpSense::Minimize;
    p.cost.resize(n);
    p.eq_matrix.resize(m, n);
    p.eq_rhs.resize(m);
    for (int j = 0; j < n; ++j) p.cost(j) = coef(rng);
    for (int i = 0; i < m; ++i) {
        p.eq_rhs(i) = coef(rng);
        for (int j = 0; j < n; ++j) p.eq_matrix(i, j) = coef(rng);
    }
    return p;
}

}  // namespace

TEST_CASE("single-constraint identity") {
    const LpProblem p = make_lp(LpSense::Minimize, {1.0}, {{1.0}}, {1.0});
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.solution(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nonnegative variables cannot sum to -1") {
    const LpProblem p = make_lp(LpSense::Minimize, {0.0, 0.0}, {{1.0, 1.0}}, {-1.0});
    CHECK(solve_lp(p).status == LpStatus::Infeasible);
}

TEST_CASE("unbounded direction is reported as a status") {
    // x1 free to grow while x2 pinned.
    const LpProblem p = make_lp(LpSense::Minimize, {-1.0, 0.0}, {{0.0, 1.0}}, {1.0});
    CHECK(solve_lp(p).status == LpStatus::Unbounded);
}

TEST_CASE("maximize sense reports the objective in its own sense") {
    // max x1 + x2 with x1 + x2 + s = 4.
    const LpProblem p =
        make_lp(LpSense::Maximize, {1.0, 1.0, 0.0}, {{1.0, 1.0, 1.0}}, {4.0});
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("validation rejects malformed programs") {
    LpProblem p = make_lp(LpSense::Minimize, {1.0}, {{1.0}}, {1.0});
    p.cost = Eigen::VectorXd::Ones(2);  // matrix is now 1x1 against 2 cost entries
    CHECK_THROWS_AS(solve_lp(p), ValidationError);

    LpProblem q = make_lp(LpSense::Minimize, {1.0}, {{1.0}}, {1.0});
    q.cost(0) = std::nan("");
    CHECK_THROWS_AS(solve_lp(q), ValidationError);
}

TEST_CASE("3-var/2-constraint instances match the vertex oracle") {
    std::mt19937 rng(20240901);
    std::uniform_int_distribution<int> coef(-5, 5);
    int optimal_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        LpProblem p;
        p.sense = LpSense::Minimize;
        p.cost.resize(3);
        p.eq_matrix.resize(2, 3);
        p.eq_rhs.resize(2);
        for (int j = 0; j < 3; ++j) p.cost(j) = coef(rng);
        for (int i = 0; i < 2; ++i) {
            p.eq_rhs(i) = coef(rng);
            for (int j = 0; j < 3; ++j) p.eq_matrix(i, j) = coef(rng);
        }
        const auto expected = oracle_solve(p);
        const LpSolution got = solve_lp(p);
        REQUIRE(got.status == expected.status);
        if (got.status == LpStatus::Optimal) {
            ++optimal_seen;
            CHECK(std::abs(got.objective - expected.objective) <=
                  1e-8 * (1.0 + std::abs(expected.objective)));
        }
    }
    CHECK(optimal_seen > 50);
}

TEST_CASE("optimal solutions satisfy the residual and sign bounds") {
    std::mt19937 rng(7); // arbitrary
    for (int trial = 0; trial < 300; ++trial) {
        const LpProblem p = random_lp(rng, 6, 4);
        const LpSolution s = solve_lp(p);
        if (s.status != LpStatus::Optimal) continue;
        const double residual =
            (p.eq_matrix * s.solution - p.eq_rhs).lpNorm<Eigen::Infinity>();
        CHECK(residual <= 1e-7 * (1.0 + p.eq_rhs.lpNorm<Eigen::Infinity>()));
        CHECK(s.solution.minCoeff() >= -1e-9);
        CHECK(s.iterations < 10 * (p.n_vars() + p.n_cons()));
    }
}

TEST_CASE("identical input gives identical output") {
    std::mt19937 rng(99); // arbitrary
    for (int trial = 0; trial < 20; ++trial) {
        const LpProblem p = random_lp(rng, 6, 4);
        const LpSolution a = solve_lp(p);
        const LpSolution b = solve_lp(p);
        REQUIRE(a.status == b.status);
        CHECK(a.iterations == b.iterations);
        if (a.status == LpStatus::Optimal) {
            CHECK(a.objective == b.objective);
            CHECK(a.solution == b.solution);
        }
    }
}

TEST_CASE("degenerate cycling-prone program terminates") {
    // Beale's example; Dantzig pricing with naive tie-breaking cycles on it.
    const LpProblem p = make_lp(
        LpSense::Minimize, {-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0},
        {{0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0},
         {0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0},
         {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0}},
        {0.0, 0.0, 1.0});
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-0.05).epsilon(1e-10));
    CHECK(s.iterations < 10 * (p.n_vars() + p.n_cons()));

    // Duplicated rows keep the basis degenerate the whole way down.
    const LpProblem q = make_lp(LpSense::Minimize, {-1.0, -1.0, 0.0, 0.0},
                                {{1.0, 1.0, 1.0, 0.0}, {1.0, 1.0, 0.0, 1.0}}, {2.0, 2.0});
    const LpSolution t = solve_lp(q);
    REQUIRE(t.status == LpStatus::Optimal);
    CHECK(t.objective == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(t.iterations < 10 * (q.n_vars() + q.n_cons()));
}
