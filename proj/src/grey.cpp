#include "greydea/grey.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "greydea/errors.hpp"

namespace greydea {

namespace {

constexpr double kDegenerateThreshold = 1e-10;

void require_positive(const Series& series, int min_len, const char* op) {
    if (static_cast<int>(series.values.size()) < min_len) {
        throw ValidationError(std::string(op) + " needs at least " + std::to_string(min_len) +
                              " observations, got " + std::to_string(series.values.size()));
    }
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        const double v = series.values[i];
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string(op) + " needs strictly positive values; year " +
                                  std::to_string(series.year_at(static_cast<int>(i))) + " has " +
                                  std::to_string(v));
        }
    }
}

}  // namespace

std::vector<double> ago(const Series& series) {
    require_positive(series, 1, "accumulated generation");
    std::vector<double> x1;
    x1.reserve(series.values.size());
    double sum = 0.0;
    for (double v : series.values) {
        sum += v;
        x1.push_back(sum);
    }
    return x1;
}

std::vector<double> mean_sequence(const std::vector<double>& x1) {
    if (x1.size() < 2) {
        throw ValidationError("mean sequence needs at least 2 accumulated values, got " +
                              std::to_string(x1.size()));
    }
    std::vector<double> z;
    z.reserve(x1.size() - 1);
    for (std::size_t k = 1; k < x1.size(); ++k) z.push_back(0.5 * (x1[k] + x1[k - 1]));
    return z;
}

Gm11Model fit_gm11(const Series& series) {
    require_positive(series, 4, "GM(1,1) fitting");
    const int n = static_cast<int>(series.values.size());
    const std::vector<double> x1 = ago(series);
    const std::vector<double> z = mean_sequence(x1);

    Eigen::MatrixXd b_mat(n - 1, 2);
    Eigen::VectorXd y(n - 1);
    for (int k = 0; k < n - 1; ++k) {
        b_mat(k, 0) = -z[k];
        b_mat(k, 1) = 1.0;
        y(k) = series.values[k + 1];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b_mat);
    if (qr.rank() < 2) {
        throw FitError("grey regression matrix is rank deficient; the accumulated series is flat");
    }
    const Eigen::Vector2d ab = qr.solve(y);
    if (!ab.allFinite()) {
        throw FitError("grey regression overflowed; the series magnitudes are too extreme");
    }

    Gm11Model model;
    model.a = ab(0);
    model.b = ab(1);
    model.first_value = series.values.front();
    model.n = n;
    model.degenerate = std::abs(model.a) < kDegenerateThreshold;

    // Class-ratio smoothness check: consecutive ratios outside
    // (exp(-2/(n+1)), exp(2/(n+1))) make grey fits unreliable. Advisory only.
    const double band = 2.0 / (n + 1);
    const double lo = std::exp(-band);
    const double hi = std::exp(band);
    for (int k = 1; k < n; ++k) {
        const double ratio = series.values[k - 1] / series.values[k];
        if (!(ratio > lo && ratio < hi)) {
            model.class_ratio_ok = false;
            break;
        }
    }
    return model;
}

std::vector<double> fitted_and_forecast(const Gm11Model& model, int horizon) {
    if (model.n < 1) throw ValidationError("model has no training length; fit it first");
    if (horizon < 0) throw ValidationError("forecast horizon must be nonnegative");

    const int total = model.n + horizon;
    std::vector<double> levels;
    levels.reserve(total);
    levels.push_back(model.first_value);

    // Accumulated trajectory from the difference equation itself:
    //   acc(k+1) = (2 - a)/(2 + a) * acc(k) + 2b/(2 + a),
    // which degenerates to acc(k+1) = acc(k) + b as a -> 0. Levels are the
    // consecutive differences, so their partial sums telescope back to acc.
    double acc = model.first_value;
    if (model.degenerate) {
        for (int k = 1; k < total; ++k) levels.push_back(model.b);
    } else {
        const double growth = (2.0 - model.a) / (2.0 + model.a);
        const double offset = 2.0 * model.b / (2.0 + model.a);
        for (int k = 1; k < total; ++k) {
            const double next = growth * acc + offset;
            levels.push_back(next - acc);
            acc = next;
        }
    }
    return levels;
}

LinearModel fit_linear(const Series& series) {
    const int n = static_cast<int>(series.values.size());
    if (n < 2) {
        throw ValidationError("linear fitting needs at least 2 observations, got " +
                              std::to_string(n));
    }
    double t_mean = 0.0, v_mean = 0.0;
    for (int i = 0; i < n; ++i) {
        t_mean += series.year_at(i);
        v_mean += series.values[i];
    }
    t_mean /= n;
    v_mean /= n;

    double stt = 0.0, stv = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dt = series.year_at(i) - t_mean;
        stt += dt * dt;
        stv += dt * (series.values[i] - v_mean);
    }
    if (stt <= 0.0) throw FitError("all observation years coincide; the trend is undefined");

    LinearModel model;
    model.slope = stv / stt;
    model.intercept = v_mean - model.slope * t_mean;
    return model;
}

BacktestReport backtest(const Series& series, int train_len, ForecastMethod method) {
    const int n = static_cast<int>(series.values.size());
    if (train_len < 4 || train_len >= n) {
        throw ValidationError("train length must satisfy 4 <= train_len < " + std::to_string(n) +
                              ", got " + std::to_string(train_len));
    }
    require_positive(series, 4, "backtesting");

    Series train;
    train.start_year = series.start_year;
    train.unit = series.unit;
    train.values.assign(series.values.begin(), series.values.begin() + train_len);

    std::vector<double> predictions(n - train_len);
    if (method == ForecastMethod::GM11) {
        const std::vector<double> levels = fitted_and_forecast(fit_gm11(train), n - train_len);
        for (int i = train_len; i < n; ++i) predictions[i - train_len] = levels[i];
    } else {
        const LinearModel model = fit_linear(train);
        for (int i = train_len; i < n; ++i) predictions[i - train_len] = model.predict(series.year_at(i));
    }

    BacktestReport report;
    double total = 0.0;
    for (int i = train_len; i < n; ++i) {
        BacktestRow row;
        row.year = series.year_at(i);
        row.actual = series.values[i];
        row.predicted = predictions[i - train_len];
        row.relative_error = std::abs(row.predicted - row.actual) / row.actual;
        total += row.relative_error;
        report.rows.push_back(row);
    }
    report.mean_relative_error = total / static_cast<double>(report.rows.size());
    return report;
}

} // namespace greydea
