#pragma once

#include <string>
#include <vector>

namespace greydea {

// Annual observations, one value per consecutive year starting at start_year.
// Grey fitting needs at least 4 strictly positive values; shorter vectors are
// fine for the plain transforms.
struct Series {
    int start_year = 0;
    std::vector<double> values;
    std::string unit;

    int year_at(int index) const { return start_year + index; }
    int last_year() const { return start_year + static_cast<int>(values.size()) - 1; }
};

// GM(1,1) coefficients for the grey difference equation
//
//   x0(k) + a * z1(k) = b,   z1(k) = (x1(k) + x1(k-1)) / 2,
//
// where x1 is the accumulated (prefix-sum) series. `a` is the development
// coefficient, `b` the grey input. Fitted and forecast levels regenerate from
// first_value by running the same difference equation forward, so a model
// whose equation fits the data exactly reproduces the data exactly.
struct Gm11Model {
    double a = 0.0;
    double b = 0.0;
    double first_value = 0.0;
    int n = 0;                   // training length
    bool degenerate = false;     // |a| < 1e-10; forecasts use the a -> 0 limit
    bool class_ratio_ok = true;  // smoothness diagnostic, advisory only
};

// Ordinary least squares of value on calendar year.
struct LinearModel {
    double slope = 0.0;  // per year
    double intercept = 0.0;

    double predict(int year) const { return slope * year + intercept; }
};

struct BacktestRow {
    int year = 0;
    double actual = 0.0;
    double predicted = 0.0;
    double relative_error = 0.0;  // |predicted - actual| / actual
};

struct BacktestReport {
    std::vector<BacktestRow> rows;
    double mean_relative_error = 0.0;
};

enum class ForecastMethod { GM11, Linear };

// Accumulated generating operation: prefix sums of a positive series.
std::vector<double> ago(const Series& series);

// Adjacent means of an accumulated series; element k averages x1[k] and x1[k+1].
std::vector<double> mean_sequence(const std::vector<double>& x1);

// Least-squares fit of (a, b), solved through a QR decomposition of the
// regression matrix rather than the normal equations.
Gm11Model fit_gm11(const Series& series);

// Fitted values for the training range plus `horizon` forecast steps,
// n + horizon level values in total. The first value anchors to the raw first
// observation exactly, and partial sums of the result match the accumulated
// trajectory to within rounding.
std::vector<double> fitted_and_forecast(const Gm11Model& model, int horizon);

LinearModel fit_linear(const Series& series);

// Train on the first train_len points, predict the rest, tabulate per-year
// relative errors and their mean.
BacktestReport backtest(const Series& series, int train_len, ForecastMethod method);

} // namespace greydea
