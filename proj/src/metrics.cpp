#include "fedprune/metrics.hpp"

#include <cmath>
#include <cstdlib>

#include "fedprune/errors.hpp"

namespace fedprune {

Metric metric_from_name(std::string_view name) {
    if (name == "magnitude") return Metric::Magnitude;
    if (name == "wanda") return Metric::Wanda;
    if (name == "ria") return Metric::Ria;
    if (name == "sparsegpt_diag") return Metric::SparseGptDiag;
    throw InputDomainError("unknown metric: " + std::string(name));
}

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::Magnitude: return "magnitude";
        case Metric::Wanda: return "wanda";
        case Metric::Ria: return "ria";
        case Metric::SparseGptDiag: return "sparsegpt_diag";
    }
    return "?";
}

FeatureNorms feature_norms(const Matrix& activations) {
    if (activations.rows() == 0 || activations.cols() == 0) {
        throw InputDomainError("feature_norms: empty activations");
    }
    FeatureNorms out;
    out.norms.assign(activations.cols(), 0.0);
    for (std::size_t t = 0; t < activations.rows(); ++t) {
        const double* row = activations.data() + t * activations.cols();
        for (std::size_t j = 0; j < activations.cols(); ++j) {
            out.norms[j] += row[j] * row[j];
        }
    }
    for (double& v : out.norms) v = std::sqrt(v);
    return out;
}

ImportanceScores score_magnitude(const Matrix& w) {
    Matrix s = w;
    for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] = std::abs(s.data()[i]);
    return {std::move(s), Metric::Magnitude};
}

ImportanceScores score_wanda(const Matrix& w, const FeatureNorms& norms) {
    if (norms.norms.size() != w.cols()) {
        throw ShapeError("score_wanda: norms length " + std::to_string(norms.norms.size()) +
                         " vs weight cols " + std::to_string(w.cols()));
    }
    Matrix s(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            s(i, j) = std::abs(w(i, j)) * norms.norms[j];
        }
    }
    ensure_finite(s, "wanda scores");
    return {std::move(s), Metric::Wanda};
}

ImportanceScores score_ria(const Matrix& w, const FeatureNorms& norms, double alpha) {
    if (norms.norms.size() != w.cols()) {
        throw ShapeError("score_ria: norms length " + std::to_string(norms.norms.size()) +
                         " vs weight cols " + std::to_string(w.cols()));
    }
    std::vector<double> row_sum(w.rows(), 0.0), col_sum(w.cols(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double a = std::abs(w(i, j));
            row_sum[i] += a;
            col_sum[j] += a;
        }
    }
    Matrix s(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const double a = std::abs(w(i, j));
            const double col_term = col_sum[j] > 0.0 ? a / col_sum[j] : 0.0;
            const double row_term = row_sum[i] > 0.0 ? a / row_sum[i] : 0.0;
            s(i, j) = (col_term + row_term) * std::pow(norms.norms[j], alpha);
        }
    }
    ensure_finite(s, "ria scores");
    return {std::move(s), Metric::Ria};
}

ImportanceScores score_sparsegpt_diag(const Matrix& w, const Matrix& activations, double lambda) {
    if (activations.cols() != w.cols()) {
        throw ShapeError("score_sparsegpt_diag: activation cols " +
                         std::to_string(activations.cols()) + " vs weight cols " +
                         std::to_string(w.cols()));
    }
    if (!(lambda > 0.0)) {
        throw InputDomainError("score_sparsegpt_diag: lambda must be positive");
    }
    Matrix gram = matmul_tn(activations, activations);
    for (std::size_t j = 0; j < gram.rows(); ++j) gram(j, j) += lambda;
    const std::vector<double> inv_diag = inverse_diagonal_spd(gram);
    Matrix s(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            s(i, j) = w(i, j) * w(i, j) / inv_diag[j];
        }
    }
    ensure_finite(s, "sparsegpt scores");
    return {std::move(s), Metric::SparseGptDiag};
}

double sparsegpt_default_lambda(const Matrix& activations) {
    double trace = 0.0;
    for (std::size_t t = 0; t < activations.rows(); ++t) {
        for (std::size_t j = 0; j < activations.cols(); ++j) {
            const double v = activations(t, j);
            trace += v * v;
        }
    }
    const double mean_diag = trace / static_cast<double>(activations.cols());
    return std::max(0.01 * mean_diag, 1e-8);
}

double resolve_sparsegpt_lambda(const Matrix& activations, const std::string& rule) {
    if (rule.empty() || rule == "default" || rule == "mean_diag") {
        return sparsegpt_default_lambda(activations);
    }
    char* end = nullptr;
    const double v = std::strtod(rule.c_str(), &end);
    if (end == rule.c_str() || *end != '\0' || !(v > 0.0)) {
        throw InputDomainError("unknown sparsegpt lambda rule: " + rule);
    }
    return v;
}

ImportanceScores score_layer(const Matrix& w, const Matrix& activations, Metric metric,
                             const MetricParams& params) {
    switch (metric) {
        case Metric::Magnitude:
            return score_magnitude(w);
        case Metric::Wanda:
            return score_wanda(w, feature_norms(activations));
        case Metric::Ria:
            return score_ria(w, feature_norms(activations), params.ria_alpha);
        case Metric::SparseGptDiag:
            return score_sparsegpt_diag(
                w, activations, resolve_sparsegpt_lambda(activations, params.sparsegpt_lambda_rule));
    }
    throw InputDomainError("score_layer: unhandled metric");
}

}  // namespace fedprune
