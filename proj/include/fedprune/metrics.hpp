#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fedprune/matrix.hpp"

namespace fedprune {

enum class Metric { Magnitude, Wanda, Ria, SparseGptDiag };

Metric metric_from_name(std::string_view name);
std::string_view metric_name(Metric m);

/// Per-entry importance, same shape as the scored weight matrix. All
/// entries are non-negative and finite.
struct ImportanceScores {
    Matrix values;
    Metric metric = Metric::Magnitude;
};

/// l2 norm of each activation column; norms[j] pairs with weight column j.
struct FeatureNorms {
    std::vector<double> norms;
};

FeatureNorms feature_norms(const Matrix& activations);

/// S = |W|.
ImportanceScores score_magnitude(const Matrix& w);

/// S_ij = |W_ij| · norms[j].
ImportanceScores score_wanda(const Matrix& w, const FeatureNorms& norms);

/// S_ij = (|W_ij|/colsum_j + |W_ij|/rowsum_i) · norms[j]^alpha.
/// A zero row or column sum contributes 0 for that term.
ImportanceScores score_ria(const Matrix& w, const FeatureNorms& norms, double alpha = 0.5);

/// S_ij = W_ij² / D_jj with D = (XᵀX + λI)⁻¹ over calibration activations.
ImportanceScores score_sparsegpt_diag(const Matrix& w, const Matrix& activations, double lambda);

/// Damping default: 0.01 · mean(diag(XᵀX)), floored at 1e-8.
double sparsegpt_default_lambda(const Matrix& activations);

/// Knobs the metric dispatcher needs beyond weights and activations.
struct MetricParams {
    double ria_alpha = 0.5;
    // "default" applies sparsegpt_default_lambda; a numeric literal fixes λ.
    std::string sparsegpt_lambda_rule = "default";
};

double resolve_sparsegpt_lambda(const Matrix& activations, const std::string& rule);

/// Scores one layer under the named metric from its weights and the
/// activations observed at its input.
ImportanceScores score_layer(const Matrix& w, const Matrix& activations, Metric metric,
                             const MetricParams& params);

}  // namespace fedprune
