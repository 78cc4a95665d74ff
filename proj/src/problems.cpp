#include "bfeopt/problems.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bfeopt/rng.hpp"

namespace bfeopt {

namespace {

void check_batch_shape(const Batch& batch, std::size_t n_features, const char* who) {
    if (batch.size() == 0) throw std::invalid_argument(std::string(who) + ": batch is empty");
    if (batch.features.size() != batch.targets.size()) {
        throw std::invalid_argument(std::string(who) + ": features/targets row count mismatch");
    }
    for (const auto& row : batch.features) {
        if (row.size() != n_features) {
            throw std::invalid_argument(std::string(who) + ": feature row width mismatch");
        }
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

LinearRegressionProblem::LinearRegressionProblem(std::size_t dimension) : dimension_(dimension) {
    if (dimension < 2) {
        throw std::invalid_argument(
            "LinearRegressionProblem: dimension must be >= 2 (weights plus intercept)");
    }
}

double LinearRegressionProblem::predict(const ParamVector& theta,
                                        const std::vector<double>& features) const {
    double p = 0.0;
    for (std::size_t j = 0; j < features.size(); ++j) {
        p += theta[j] * features[j];
    }
    p += theta[dimension_ - 1];
    return p;
}

double LinearRegressionProblem::loss(const ParamVector& theta, const Batch& batch) const {
    if (theta.size() != dimension_) {
        throw std::invalid_argument("LinearRegressionProblem::loss: theta size mismatch");
    }
    check_batch_shape(batch, dimension_ - 1, "LinearRegressionProblem::loss");
    double sum = 0.0;
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const double res = predict(theta, batch.features[r]) - batch.targets[r];
        sum += res * res;
    }
    return sum / static_cast<double>(batch.size());
}

GradVector LinearRegressionProblem::gradient(const ParamVector& theta, const Batch& batch) const {
    if (theta.size() != dimension_) {
        throw std::invalid_argument("LinearRegressionProblem::gradient: theta size mismatch");
    }
    check_batch_shape(batch, dimension_ - 1, "LinearRegressionProblem::gradient");
    GradVector grad(dimension_, 0.0);
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const double res = predict(theta, batch.features[r]) - batch.targets[r];
        for (std::size_t j = 0; j + 1 < dimension_; ++j) {
            grad[j] += res * batch.features[r][j];
        }
        grad[dimension_ - 1] += res;
    }
    const double scale = 2.0 / static_cast<double>(batch.size());
    for (double& gi : grad) gi *= scale;
    return grad;
}

void RegressionSpec::validate() const {
    if (true_weights.size() < 2) {
        throw std::invalid_argument(
            "RegressionSpec: true_weights needs at least one weight plus the intercept");
    }
    if (!all_finite(true_weights)) {
        throw std::invalid_argument("RegressionSpec: true_weights must be finite");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw std::invalid_argument("RegressionSpec: noise_std must be >= 0 and finite");
    }
    if (n_samples < 1) throw std::invalid_argument("RegressionSpec: n_samples must be >= 1");
    if (!std::isfinite(feature_min) || !std::isfinite(feature_max) ||
        !(feature_min < feature_max)) {
        throw std::invalid_argument("RegressionSpec: need finite feature_min < feature_max");
    }
}

RegressionData make_regression(const RegressionSpec& spec) {
    spec.validate();
    const std::size_t k = spec.true_weights.size() - 1;
    LinearRegressionProblem problem(spec.true_weights.size());

    Batch dataset;
    dataset.features.resize(spec.n_samples);
    dataset.targets.resize(spec.n_samples);
    Rng rng(spec.seed);
    for (std::size_t r = 0; r < spec.n_samples; ++r) {
        std::vector<double> row(k);
        for (std::size_t j = 0; j < k; ++j) {
            row[j] = rng.uniform(spec.feature_min, spec.feature_max);
        }
        // The Gaussian is drawn even at noise_std == 0, so the feature stream
        // is identical across noise levels.
        const double noise = rng.gaussian();
        dataset.targets[r] = problem.predict(spec.true_weights, row) + spec.noise_std * noise;
        dataset.features[r] = std::move(row);
    }
    return RegressionData{std::move(dataset), problem};
}

void QuadraticSpec::validate() const {
    const std::size_t n = theta_opt.size();
    if (n == 0) throw std::invalid_argument("QuadraticSpec: theta_opt must be nonempty");
    if (!all_finite(theta_opt)) throw std::invalid_argument("QuadraticSpec: theta_opt must be finite");
    if (curvature.size() != n) {
        throw std::invalid_argument("QuadraticSpec: curvature must be square, matching theta_opt");
    }
    for (const auto& row : curvature) {
        if (row.size() != n) {
            throw std::invalid_argument("QuadraticSpec: curvature must be square, matching theta_opt");
        }
        if (!all_finite(row)) throw std::invalid_argument("QuadraticSpec: curvature must be finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (curvature[i][j] != curvature[j][i]) {
                throw std::invalid_argument("QuadraticSpec: curvature must be symmetric");
            }
        }
    }
    // Positive definiteness via a Cholesky factorization: every pivot must be
    // strictly positive.
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = curvature[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) {
                    throw std::invalid_argument("QuadraticSpec: curvature must be positive-definite");
                }
                l[i][j] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
}

QuadraticProblem::QuadraticProblem(QuadraticSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

double QuadraticProblem::loss(const ParamVector& theta, const Batch& batch) const {
    (void)batch;
    const std::size_t n = spec_.theta_opt.size();
    if (theta.size() != n) {
        throw std::invalid_argument("QuadraticProblem::loss: theta size mismatch");
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = theta[i] - spec_.theta_opt[i];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ad = 0.0;
        for (std::size_t j = 0; j < n; ++j) ad += spec_.curvature[i][j] * d[j];
        sum += d[i] * ad;
    }
    return 0.5 * sum;
}

GradVector QuadraticProblem::gradient(const ParamVector& theta, const Batch& batch) const {
    (void)batch;
    const std::size_t n = spec_.theta_opt.size();
    if (theta.size() != n) {
        throw std::invalid_argument("QuadraticProblem::gradient: theta size mismatch");
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = theta[i] - spec_.theta_opt[i];
    GradVector grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double ad = 0.0;
        for (std::size_t j = 0; j < n; ++j) ad += spec_.curvature[i][j] * d[j];
        grad[i] = ad;
    }
    return grad;
}

QuadraticProblem make_quadratic(const QuadraticSpec& spec) { return QuadraticProblem(spec); }

Batch placeholder_dataset() {
    Batch b;
    b.features = {{}};
    b.targets = {0.0};
    return b;
}

double LandscapeGrid::x_at(std::size_t ix) const {
    return bounds.x_min + (bounds.x_max - bounds.x_min) *
                              (static_cast<double>(ix) / static_cast<double>(resolution - 1));
}

double LandscapeGrid::y_at(std::size_t iy) const {
    return bounds.y_min + (bounds.y_max - bounds.y_min) *
                              (static_cast<double>(iy) / static_cast<double>(resolution - 1));
}

double LandscapeGrid::value_at(std::size_t ix, std::size_t iy) const {
    return values[iy * resolution + ix];
}

LandscapeGrid landscape_grid(const Problem& problem, const Batch& batch,
                             const LandscapeBounds& bounds, std::size_t resolution) {
    if (problem.dimension() != 2) {
        throw std::invalid_argument("landscape_grid: problem must be 2D");
    }
    if (resolution < 2) throw std::invalid_argument("landscape_grid: resolution must be >= 2");
    if (!std::isfinite(bounds.x_min) || !std::isfinite(bounds.x_max) ||
        !std::isfinite(bounds.y_min) || !std::isfinite(bounds.y_max) ||
        !(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max)) {
        throw std::invalid_argument("landscape_grid: bounds must be finite with min < max");
    }
    LandscapeGrid grid;
    grid.bounds = bounds;
    grid.resolution = resolution;
    grid.values.resize(resolution * resolution);
    for (std::size_t iy = 0; iy < resolution; ++iy) {
        for (std::size_t ix = 0; ix < resolution; ++ix) {
            grid.values[iy * resolution + ix] =
                problem.loss({grid.x_at(ix), grid.y_at(iy)}, batch);
        }
    }
    return grid;
}

void write_dataset_csv(const std::string& path, const Batch& dataset) {
    if (dataset.size() == 0) throw std::invalid_argument("write_dataset_csv: dataset is empty");
    const std::size_t k = dataset.features.front().size();
    check_batch_shape(dataset, k, "write_dataset_csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
    for (std::size_t j = 0; j < k; ++j) out << "x" << j << ",";
    out << "y\n";
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        for (std::size_t j = 0; j < k; ++j) out << format_double(dataset.features[r][j]) << ",";
        out << format_double(dataset.targets[r]) << "\n";
    }
    if (!out) throw std::runtime_error("write_dataset_csv: write failed for " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& text, const std::string& path) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + text.size()) {
        throw std::runtime_error("read_dataset_csv: bad numeric field '" + text + "' in " + path);
    }
    return v;
}

}  // namespace

Batch read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_dataset_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_dataset_csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header.back() != "y") {
        throw std::runtime_error("read_dataset_csv: header must end with a y column in " + path);
    }
    const std::size_t k = header.size() - 1;

    Batch dataset;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != k + 1) {
            throw std::runtime_error("read_dataset_csv: row width mismatch in " + path);
        }
        std::vector<double> row(k);
        for (std::size_t j = 0; j < k; ++j) row[j] = parse_double(fields[j], path);
        dataset.features.push_back(std::move(row));
        dataset.targets.push_back(parse_double(fields[k], path));
    }
    if (dataset.size() == 0) throw std::runtime_error("read_dataset_csv: no data rows in " + path);
    return dataset;
}

}  // namespace bfeopt
