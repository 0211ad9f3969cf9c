#include "greydea/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "greydea/errors.hpp"

namespace greydea {

namespace {

constexpr double kPivotEps = 1e-9;  // entries below this count as zero

// Dense tableau. Rows 0..m-1 are constraints, row m holds the reduced costs
// with the negated objective value in the rhs column.
struct Tableau {
    Eigen::MatrixXd t;       // (m+1) x (cols+1)
    std::vector<int> basis;  // basis[i] = column basic in row i
    int m = 0;
    int cols = 0;

    double rhs(int row) const { return t(row, cols); }
    double objective() const { return -t(m, cols); }
};

void pivot(Tableau& tab, int row, int col) {
    tab.t.row(row) /= tab.t(row, col);
    for (int i = 0; i <= tab.m; ++i) {
        if (i == row) continue;
        const double f = tab.t(i, col);
        if (f != 0.0) tab.t.row(i) -= f * tab.t.row(row);
    }
    tab.basis[row] = col;
}

int entering_dantzig(const Tableau& tab) {
    int best = -1;
    double most_negative = -kPivotEps;
    for (int j = 0; j < tab.cols; ++j) {
        const double rc = tab.t(tab.m, j);
        if (rc < most_negative) {
            most_negative = rc;
            best = j;
        }
    }
    return best;
}

int entering_bland(const Tableau& tab) {
    for (int j = 0; j < tab.cols; ++j) {
        if (tab.t(tab.m, j) < -kPivotEps) return j;
    }
    return -1;
}

// Smallest-ratio row. Ties go to the row whose basic variable has the lowest
// index, which keeps the test compatible with Bland's rule.
int leaving_row(const Tableau& tab, int enter) {
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tab.m; ++i) {
        const double a = tab.t(i, enter);
        if (a <= kPivotEps) continue;
        best_ratio = std::min(best_ratio, tab.rhs(i) / a);
    }
    if (!std::isfinite(best_ratio)) return -1;

    const double tie_band = best_ratio + 1e-12 * (1.0 + std::abs(best_ratio));
    int best = -1;
    for (int i = 0; i < tab.m; ++i) {
        const double a = tab.t(i, enter);
        if (a <= kPivotEps) continue;
        if (tab.rhs(i) / a <= tie_band && (best < 0 || tab.basis[i] < tab.basis[best])) {
            best = i;
        }
    }
    return best;
}

enum class PhaseOutcome { Optimal, Unbounded };

PhaseOutcome run_phase(Tableau& tab, int stall_limit, int iteration_cap, int& iterations) {
    bool bland = false;
    int stalled = 0;
    double last_objective = tab.objective();
    while (true) {
        const int enter = bland ? entering_bland(tab) : entering_dantzig(tab);
        if (enter < 0) return PhaseOutcome::Optimal;
        const int leave = leaving_row(tab, enter);
        if (leave < 0) return PhaseOutcome::Unbounded;
        pivot(tab, leave, enter);
        if (++iterations > iteration_cap) {
            throw SolverError("simplex exceeded its iteration cap (" +
                              std::to_string(iteration_cap) + ")");
        }
        const double objective = tab.objective();
        if (objective < last_objective - 1e-12 * (1.0 + std::abs(last_objective))) {
            last_objective = objective;
            stalled = 0;
        } else if (!bland && ++stalled > stall_limit) {
            bland = true;
        }
    }
}

void validate(const LpProblem& p) {
    if (p.n_vars() < 1) {
        throw ValidationError("linear program has no variables");
    }
    if (p.eq_matrix.rows() != p.n_cons() || p.eq_matrix.cols() != p.n_vars()) {
        throw ValidationError(
            "constraint matrix is " + std::to_string(p.eq_matrix.rows()) + "x" +
            std::to_string(p.eq_matrix.cols()) + " but expected " +
            std::to_string(p.n_cons()) + "x" + std::to_string(p.n_vars()));
    }
    if (!p.cost.allFinite() || !p.eq_matrix.allFinite() || !p.eq_rhs.allFinite()) {
        throw ValidationError("linear program contains NaN or infinite entries");
    }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    validate(problem);

    const int n = problem.n_vars();
    const int m = problem.n_cons();

    Eigen::VectorXd cost = problem.cost;
    if (problem.sense == LpSense::Maximize) cost = -cost;

    Eigen::MatrixXd a = problem.eq_matrix;
    Eigen::VectorXd b = problem.eq_rhs;
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0) {
            a.row(i) = -a.row(i);
            b(i) = -b(i);
        }
    }

    const double feas_tol = 1e-7 * (1.0 + b.lpNorm<Eigen::Infinity>());
    const int stall_limit = 2 * (n + m);
    const int iteration_cap = 2000 + 200 * (n + m);
    int iterations = 0;

    // Phase 1: identity basis of artificial variables, minimize their sum.
    Tableau tab;
    tab.m = m;
    tab.cols = n + m;
    tab.t = Eigen::MatrixXd::Zero(m + 1, tab.cols + 1);
    tab.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        tab.t.block(i, 0, 1, n) = a.row(i);
        tab.t(i, n + i) = 1.0;
        tab.t(i, tab.cols) = b(i);
        tab.basis[i] = n + i;
    }
    for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
    for (int i = 0; i < m; ++i) tab.t(m, n + i) = 0.0;

    if (run_phase(tab, stall_limit, iteration_cap, iterations) != PhaseOutcome::Optimal) {
        throw SolverError("phase-1 objective is bounded below by zero yet reported unbounded");
    }
    if (tab.objective() > feas_tol) {
        LpSolution out;
        out.status = LpStatus::Infeasible;
        out.iterations = iterations;
        return out;
    }

    // Drive leftover artificial variables out of the basis. A row that offers
    // no structural pivot is redundant and gets dropped.
    std::vector<int> keep;
    keep.reserve(m);
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) {
            keep.push_back(i);
            continue;
        }
        int pivot_col = -1;
        double pivot_mag = kPivotEps;
        for (int j = 0; j < n; ++j) {
            const double mag = std::abs(tab.t(i, j));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_col = j;
            }
        }
        if (pivot_col >= 0) {
            pivot(tab, i, pivot_col);
            ++iterations;
            keep.push_back(i);
        }
    }

    // Phase 2: structural columns only, original costs.
    Tableau tab2;
    tab2.m = static_cast<int>(keep.size());
    tab2.cols = n;
    tab2.t = Eigen::MatrixXd::Zero(tab2.m + 1, n + 1);
    tab2.basis.resize(tab2.m);
    for (int i = 0; i < tab2.m; ++i) {
        tab2.t.block(i, 0, 1, n) = tab.t.block(keep[i], 0, 1, n);
        tab2.t(i, n) = tab.rhs(keep[i]);
        tab2.basis[i] = tab.basis[keep[i]];
    }
    tab2.t.block(tab2.m, 0, 1, n) = cost.transpose();
    for (int i = 0; i < tab2.m; ++i) {
        const double f = tab2.t(tab2.m, tab2.basis[i]);
        if (f != 0.0) tab2.t.row(tab2.m) -= f * tab2.t.row(i);
    }

    LpSolution out;
    out.iterations = iterations;
    if (run_phase(tab2, stall_limit, iteration_cap, iterations) == PhaseOutcome::Unbounded) {
        out.status = LpStatus::Unbounded;
        out.iterations = iterations;
        return out;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < tab2.m; ++i) x(tab2.basis[i]) = tab2.rhs(i);

    out.status = LpStatus::Optimal;
    out.solution = std::move(x);
    out.objective = problem.cost.dot(out.solution);
    out.iterations = iterations;
    return out;
}

} // namespace greydea
