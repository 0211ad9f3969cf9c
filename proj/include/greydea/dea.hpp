#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace greydea {

enum class Orientation { Input, Output };
enum class ReturnsToScale { CRS, VRS };
enum class SlackStage { RadialOnly, TwoStage };
enum class RtsClass { Increasing, Decreasing, Constant };

// Raw inputs must be strictly positive. ReplaceZeros substitutes exact zeros
// with 1e-6 times the smallest positive entry of the same input row; negative
// inputs are rejected under either policy.
enum class ZeroInputPolicy { Reject, ReplaceZeros };

struct DeaOptions {
    Orientation orientation = Orientation::Input;
    ReturnsToScale returns_to_scale = ReturnsToScale::VRS;
    SlackStage slack_stage = SlackStage::TwoStage;
};

// Peer set for an efficiency evaluation: n decision-making units (columns),
// w input kinds (rows of `inputs`) and q output kinds (rows of `outputs`).
// Immutable after construction; validation happens in the constructor.
class DeaInstance {
public:
    DeaInstance(std::vector<std::string> dmu_names,
                Eigen::MatrixXd inputs,
                Eigen::MatrixXd outputs,
                std::vector<std::string> input_names = {},
                std::vector<std::string> output_names = {},
                std::vector<std::string> input_units = {},
                std::vector<std::string> output_units = {},
                ZeroInputPolicy policy = ZeroInputPolicy::Reject);

    int n_dmus() const { return static_cast<int>(inputs_.cols()); }
    int n_inputs() const { return static_cast<int>(inputs_.rows()); }
    int n_outputs() const { return static_cast<int>(outputs_.rows()); }

    const std::vector<std::string>& dmu_names() const { return dmu_names_; }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::MatrixXd& outputs() const { return outputs_; }
    const std::vector<std::string>& input_names() const { return input_names_; }
    const std::vector<std::string>& output_names() const { return output_names_; }
    const std::vector<std::string>& input_units() const { return input_units_; }
    const std::vector<std::string>& output_units() const { return output_units_; }

private:
    std::vector<std::string> dmu_names_;
    Eigen::MatrixXd inputs_;   // w x n, strictly positive
    Eigen::MatrixXd outputs_;  // q x n, nonnegative, one positive entry per DMU
    std::vector<std::string> input_names_;
    std::vector<std::string> output_names_;
    std::vector<std::string> input_units_;
    std::vector<std::string> output_units_;
};

// Radial efficiency of one DMU. `score` is the input contraction factor theta
// (<= 1) under input orientation, or the output expansion factor eta (>= 1)
// under output orientation. `efficient` holds exactly when the score is 1 and
// every slack vanishes (within 1e-6), i.e. the unit sits on the frontier with
// no residual input excess or output shortfall.
struct DeaScore {
    int dmu_index = 0;
    Orientation orientation = Orientation::Input;
    ReturnsToScale returns_to_scale = ReturnsToScale::VRS;
    double score = 1.0;
    Eigen::VectorXd lambdas;        // reference weights, length n
    Eigen::VectorXd input_slacks;   // length w, original units
    Eigen::VectorXd output_slacks;  // length q, original units
    double sum_lambda = 0.0;
    bool efficient = false;
};

struct RtsClassification {
    RtsClass rts = RtsClass::Constant;
    // Set when an inefficient unit lands within 1e-7 of sum(lambda) == 1, where
    // the increasing/decreasing rule cannot distinguish the sides.
    bool boundary = false;
};

// TE from the constant-returns frontier, PTE from the variable-returns one,
// SE = TE / PTE. Output-oriented runs store reciprocal scores (1/eta) so that
// all three stay in (0, 1].
struct EfficiencyDecomposition {
    double te = 1.0;
    double pte = 1.0;
    double se = 1.0;
    RtsClass rts_class = RtsClass::Constant;
    bool rts_boundary = false;
};

struct ProjectionTarget {
    Eigen::VectorXd target_inputs;   // length w
    Eigen::VectorXd target_outputs;  // length q
};

// Radial efficiency of one unit against the whole peer set. With TwoStage the
// slacks maximize total residual excess/shortfall at the fixed radial score;
// with RadialOnly they are whatever the radial solve happened to produce.
DeaScore evaluate_dmu(const DeaInstance& instance, int dmu, const DeaOptions& options = {});

// evaluate_dmu for every unit, in column order.
std::vector<DeaScore> evaluate_all(const DeaInstance& instance, const DeaOptions& options = {});

// Returns-to-scale from a constant-returns score: efficient units are Constant;
// otherwise sum(lambda) < 1 means Increasing and > 1 means Decreasing.
// Requires a CRS score.
RtsClassification classify_rts(const DeaScore& crs_score);

// Runs the unit under both frontiers and splits technical efficiency into its
// pure-technical and scale parts.
EfficiencyDecomposition decompose(const DeaInstance& instance, int dmu,
                                  Orientation orientation = Orientation::Input);

// Frontier coordinates the unit should move to: inputs shrink by the radial
// factor and the input slacks, outputs grow by the output slacks (input
// orientation); outputs expand radially instead under output orientation.
ProjectionTarget project(const DeaInstance& instance, const DeaScore& score);

} // namespace greydea
