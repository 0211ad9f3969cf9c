#pragma once

#include <Eigen/Dense>

namespace greydea {

enum class LpSense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Standard-form linear program:
//
//   optimize  cost' x
//   subject to  eq_matrix x == eq_rhs,  x >= 0
//
// Free variables are not supported here; callers encode them as differences of
// two nonnegative variables.
struct LpProblem {
    LpSense sense = LpSense::Minimize;
    Eigen::VectorXd cost;       // length n_vars
    Eigen::MatrixXd eq_matrix;  // n_cons x n_vars
    Eigen::VectorXd eq_rhs;     // length n_cons

    int n_vars() const { return static_cast<int>(cost.size()); }
    int n_cons() const { return static_cast<int>(eq_rhs.size()); }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd solution;  // empty unless Optimal
    double objective = 0.0;    // in the problem's own sense
    int iterations = 0;        // simplex pivots across both phases
};

// Two-phase dense primal simplex.
//
// Deterministic: the same problem produces the same solution bit-for-bit on
// one platform. Pricing is Dantzig's rule, falling back to Bland's rule once
// the objective stalls for 2*(n_vars+n_cons) pivots, so degenerate programs
// cannot cycle. Entries with magnitude below 1e-9 are treated as zero.
//
// Throws ValidationError on dimension mismatches or non-finite input.
// Infeasible and Unbounded are reported as statuses, not errors.
LpSolution solve_lp(const LpProblem& problem);

} // namespace greydea
