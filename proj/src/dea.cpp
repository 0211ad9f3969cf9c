#include "greydea/dea.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "greydea/errors.hpp"
#include "greydea/lp.hpp"

namespace greydea {

namespace {

constexpr double kEfficiencyTol = 1e-6;
constexpr double kSumLambdaTieBand = 1e-7;

std::vector<std::string> default_names(const std::string& prefix, int count,
                                       std::vector<std::string> given) {
    if (!given.empty()) return given;
    std::vector<std::string> names;
    names.reserve(count);
    for (int i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i + 1));
    return names;
}

// Scores are invariant under per-row rescaling, so the envelopment programs
// are solved on rows normalized by their maxima; slacks are mapped back to
// original units afterwards.
struct NormalizedData {
    Eigen::MatrixXd x;  // w x n
    Eigen::MatrixXd y;  // q x n
    Eigen::VectorXd x_scale;
    Eigen::VectorXd y_scale;
};

NormalizedData normalize(const DeaInstance& inst) {
    NormalizedData d;
    d.x_scale = inst.inputs().rowwise().maxCoeff();  // positive by construction
    d.y_scale = inst.outputs().rowwise().maxCoeff();
    for (int r = 0; r < d.y_scale.size(); ++r) {
        if (d.y_scale(r) <= 0.0) d.y_scale(r) = 1.0;  // an all-zero output row
    }
    d.x = d.x_scale.cwiseInverse().asDiagonal() * inst.inputs();
    d.y = d.y_scale.cwiseInverse().asDiagonal() * inst.outputs();
    return d;
}

LpSolution solve_or_throw(const LpProblem& problem, const std::string& context) {
    LpSolution sol = solve_lp(problem);
    if (sol.status != LpStatus::Optimal) {
        throw SolverError("envelopment program " + context + " returned " +
                          (sol.status == LpStatus::Infeasible ? "Infeasible" : "Unbounded") +
                          "; a well-formed instance always admits the self-reference solution");
    }
    return sol;
}

// Stage 1, input orientation:   min theta
//   sum_j lambda_j x_ij + s-_i - theta x_i0 = 0
//   sum_j lambda_j y_rj - s+_r          = y_r0
//   [sum_j lambda_j = 1 under VRS]
// Output orientation mirrors the radial factor onto the output rows. The free
// radial factor is encoded as the difference of two nonnegative columns.
// Variable layout: [lambda(n), s-(w), s+(q), radial+, radial-].
LpProblem radial_program(const NormalizedData& d, int dmu, const DeaOptions& opt) {
    const int n = static_cast<int>(d.x.cols());
    const int w = static_cast<int>(d.x.rows());
    const int q = static_cast<int>(d.y.rows());
    const bool vrs = opt.returns_to_scale == ReturnsToScale::VRS;
    const int rows = w + q + (vrs ? 1 : 0);
    const int cols = n + w + q + 2;

    LpProblem p;
    p.sense = opt.orientation == Orientation::Input ? LpSense::Minimize : LpSense::Maximize;
    p.cost = Eigen::VectorXd::Zero(cols);
    p.cost(cols - 2) = 1.0;
    p.cost(cols - 1) = -1.0;
    p.eq_matrix = Eigen::MatrixXd::Zero(rows, cols);
    p.eq_rhs = Eigen::VectorXd::Zero(rows);

    for (int i = 0; i < w; ++i) {
        p.eq_matrix.block(i, 0, 1, n) = d.x.row(i);
        p.eq_matrix(i, n + i) = 1.0;
        if (opt.orientation == Orientation::Input) {
            p.eq_matrix(i, cols - 2) = -d.x(i, dmu);
            p.eq_matrix(i, cols - 1) = d.x(i, dmu);
        } else {
            p.eq_rhs(i) = d.x(i, dmu);
        }
    }
    for (int r = 0; r < q; ++r) {
        p.eq_matrix.block(w + r, 0, 1, n) = d.y.row(r);
        p.eq_matrix(w + r, n + w + r) = -1.0;
        if (opt.orientation == Orientation::Output) {
            p.eq_matrix(w + r, cols - 2) = -d.y(r, dmu);
            p.eq_matrix(w + r, cols - 1) = d.y(r, dmu);
        } else {
            p.eq_rhs(w + r) = d.y(r, dmu);
        }
    }
    if (vrs) {
        p.eq_matrix.block(rows - 1, 0, 1, n).setOnes();
        p.eq_rhs(rows - 1) = 1.0;
    }
    return p;
}

// Stage 2: radial score fixed, maximize the slack sum. The program runs on
// normalized rows, so the objective carries the row scales to make the sum
// count original data units. Variable layout: [lambda(n), s-(w), s+(q)].
LpProblem slack_program(const NormalizedData& d, int dmu, const DeaOptions& opt, double score) {
    const int n = static_cast<int>(d.x.cols());
    const int w = static_cast<int>(d.x.rows());
    const int q = static_cast<int>(d.y.rows());
    const bool vrs = opt.returns_to_scale == ReturnsToScale::VRS;
    const int rows = w + q + (vrs ? 1 : 0);
    const int cols = n + w + q;

    LpProblem p;
    p.sense = LpSense::Maximize;
    p.cost = Eigen::VectorXd::Zero(cols);
    p.cost.segment(n, w) = d.x_scale;
    p.cost.tail(q) = d.y_scale;
    p.eq_matrix = Eigen::MatrixXd::Zero(rows, cols);
    p.eq_rhs = Eigen::VectorXd::Zero(rows);

    const double input_factor = opt.orientation == Orientation::Input ? score : 1.0;
    const double output_factor = opt.orientation == Orientation::Output ? score : 1.0;
    for (int i = 0; i < w; ++i) {
        p.eq_matrix.block(i, 0, 1, n) = d.x.row(i);
        p.eq_matrix(i, n + i) = 1.0;
        p.eq_rhs(i) = input_factor * d.x(i, dmu);
    }
    for (int r = 0; r < q; ++r) {
        p.eq_matrix.block(w + r, 0, 1, n) = d.y.row(r);
        p.eq_matrix(w + r, n + w + r) = -1.0;
        p.eq_rhs(w + r) = output_factor * d.y(r, dmu);
    }
    if (vrs) {
        p.eq_matrix.block(rows - 1, 0, 1, n).setOnes();
        p.eq_rhs(rows - 1) = 1.0;
    }
    return p;
}

} // namespace

DeaInstance::DeaInstance(std::vector<std::string> dmu_names,
                         Eigen::MatrixXd inputs,
                         Eigen::MatrixXd outputs,
                         std::vector<std::string> input_names,
                         std::vector<std::string> output_names,
                         std::vector<std::string> input_units,
                         std::vector<std::string> output_units,
                         ZeroInputPolicy policy)
    : dmu_names_(std::move(dmu_names)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)) {
    const int n = static_cast<int>(inputs_.cols());
    const int w = static_cast<int>(inputs_.rows());
    const int q = static_cast<int>(outputs_.rows());

    if (n < 2) throw ValidationError("an instance needs at least 2 DMUs, got " + std::to_string(n));
    if (w < 1 || q < 1) throw ValidationError("an instance needs at least one input and one output row");
    if (outputs_.cols() != n) {
        throw ValidationError("inputs cover " + std::to_string(n) + " DMUs but outputs cover " +
                              std::to_string(outputs_.cols()));
    }
    if (static_cast<int>(dmu_names_.size()) != n) {
        throw ValidationError("expected " + std::to_string(n) + " DMU names, got " +
                              std::to_string(dmu_names_.size()));
    }
    if (!inputs_.allFinite() || !outputs_.allFinite()) {
        throw ValidationError("instance matrices contain NaN or infinite entries");
    }

    input_names_ = default_names("input", w, std::move(input_names));
    output_names_ = default_names("output", q, std::move(output_names));
    input_units_ = input_units.empty() ? std::vector<std::string>(w, "") : std::move(input_units);
    output_units_ = output_units.empty() ? std::vector<std::string>(q, "") : std::move(output_units);
    if (static_cast<int>(input_names_.size()) != w || static_cast<int>(output_names_.size()) != q ||
        static_cast<int>(input_units_.size()) != w || static_cast<int>(output_units_.size()) != q) {
        throw ValidationError("row name or unit count does not match the matrix shape");
    }

    for (int i = 0; i < w; ++i) {
        double min_positive = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = inputs_(i, j);
            if (v > 0 && (min_positive == 0.0 || v < min_positive)) min_positive = v;
        }
        for (int j = 0; j < n; ++j) {
            double& v = inputs_(i, j);
            if (v > 0) continue;
            if (v == 0.0 && policy == ZeroInputPolicy::ReplaceZeros && min_positive > 0) {
                v = 1e-6 * min_positive;
            } else {
                throw ValidationError("nonpositive input for DMU '" + dmu_names_[j] +
                                      "', row '" + input_names_[i] + "'");
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        bool any_positive = false;
        for (int r = 0; r < q; ++r) {
            if (outputs_(r, j) < 0) {
                throw ValidationError("negative output for DMU '" + dmu_names_[j] + "', row '" +
                                      output_names_[r] + "'");
            }
            any_positive = any_positive || outputs_(r, j) > 0;
        }
        if (!any_positive) {
            throw ValidationError("DMU '" + dmu_names_[j] + "' has no strictly positive output");
        }
    }
}

DeaScore evaluate_dmu(const DeaInstance& instance, int dmu, const DeaOptions& options) {
    if (dmu < 0 || dmu >= instance.n_dmus()) {
        throw ValidationError("DMU index " + std::to_string(dmu) + " out of range [0, " +
                              std::to_string(instance.n_dmus()) + ")");
    }
    const NormalizedData d = normalize(instance);
    const int n = instance.n_dmus();
    const int w = instance.n_inputs();
    const int q = instance.n_outputs();

    const LpSolution radial =
        solve_or_throw(radial_program(d, dmu, options),
                       "radial/" + instance.dmu_names()[dmu]);
    const double score = radial.solution(n + w + q) - radial.solution(n + w + q + 1);

    Eigen::VectorXd lambdas, in_slack, out_slack;
    if (options.slack_stage == SlackStage::TwoStage) {
        const LpSolution stage2 =
            solve_or_throw(slack_program(d, dmu, options, score),
                           "slack/" + instance.dmu_names()[dmu]);
        lambdas = stage2.solution.head(n);
        in_slack = stage2.solution.segment(n, w);
        out_slack = stage2.solution.segment(n + w, q);
    } else {
        lambdas = radial.solution.head(n);
        in_slack = radial.solution.segment(n, w);
        out_slack = radial.solution.segment(n + w, q);
    }

    DeaScore result;
    result.dmu_index = dmu;
    result.orientation = options.orientation;
    result.returns_to_scale = options.returns_to_scale;
    result.score = score;
    result.lambdas = std::move(lambdas);
    result.input_slacks = d.x_scale.cwiseProduct(in_slack);
    result.output_slacks = d.y_scale.cwiseProduct(out_slack);
    result.sum_lambda = result.lambdas.sum();
    result.efficient = std::abs(score - 1.0) <= kEfficiencyTol &&
                       result.input_slacks.maxCoeff() <= kEfficiencyTol &&
                       result.output_slacks.maxCoeff() <= kEfficiencyTol;
    return result;
}

std::vector<DeaScore> evaluate_all(const DeaInstance& instance, const DeaOptions& options) {
    std::vector<DeaScore> scores;
    scores.reserve(instance.n_dmus());
    for (int j = 0; j < instance.n_dmus(); ++j) scores.push_back(evaluate_dmu(instance, j, options));
    return scores;
}

RtsClassification classify_rts(const DeaScore& crs_score) {
    if (crs_score.returns_to_scale != ReturnsToScale::CRS) {
        throw ValidationError("returns-to-scale classification needs a CRS score");
    }
    RtsClassification c;
    if (crs_score.efficient) {
        c.rts = RtsClass::Constant;
    } else if (crs_score.sum_lambda < 1.0 - kSumLambdaTieBand) {
        c.rts = RtsClass::Increasing;
    } else if (crs_score.sum_lambda > 1.0 + kSumLambdaTieBand) {
        c.rts = RtsClass::Decreasing;
    } else {
        c.rts = RtsClass::Constant;
        c.boundary = true;
    }
    return c;
}

EfficiencyDecomposition decompose(const DeaInstance& instance, int dmu, Orientation orientation) {
    DeaOptions opt;
    opt.orientation = orientation;
    opt.slack_stage = SlackStage::TwoStage;

    opt.returns_to_scale = ReturnsToScale::CRS;
    const DeaScore crs = evaluate_dmu(instance, dmu, opt);
    opt.returns_to_scale = ReturnsToScale::VRS;
    const DeaScore vrs = evaluate_dmu(instance, dmu, opt);

    EfficiencyDecomposition out;
    out.te = orientation == Orientation::Input ? crs.score : 1.0 / crs.score;
    out.pte = orientation == Orientation::Input ? vrs.score : 1.0 / vrs.score;
    out.se = out.te / out.pte;
    const RtsClassification rts = classify_rts(crs);
    out.rts_class = rts.rts;
    out.rts_boundary = rts.boundary;
    return out;
}

ProjectionTarget project(const DeaInstance& instance, const DeaScore& score) {
    if (score.dmu_index < 0 || score.dmu_index >= instance.n_dmus()) {
        throw ValidationError("score does not belong to this instance");
    }
    if (score.input_slacks.size() != instance.n_inputs() ||
        score.output_slacks.size() != instance.n_outputs()) {
        throw ValidationError("score slack shapes do not match this instance");
    }
    const Eigen::VectorXd x0 = instance.inputs().col(score.dmu_index);
    const Eigen::VectorXd y0 = instance.outputs().col(score.dmu_index);

    ProjectionTarget t;
    if (score.orientation == Orientation::Input) {
        t.target_inputs = score.score * x0 - score.input_slacks;
        t.target_outputs = y0 + score.output_slacks;
    } else {
        t.target_inputs = x0 - score.input_slacks;
        t.target_outputs = score.score * y0 + score.output_slacks;
    }
    return t;
}

} // namespace greydea
