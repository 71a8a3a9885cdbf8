#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedprune/federation.hpp"
#include "fedprune/model.hpp"

namespace fedprune {

/// exp of the mean next-token negative log-likelihood (natural log) over
/// every in-sequence prediction in the batch.
double perplexity(const PrunableModel& model, const TokenBatch& heldout);

/// Squared Frobenius norm of (W − W_pruned)·Xᵀ: the layer output error the
/// mask introduced on inputs X (tokens × d_in).
double reconstruction_error(const Matrix& w, const Matrix& w_pruned, const Matrix& activations);

/// Fraction of exactly-zero weights, per prunable layer.
std::vector<double> realized_sparsity(const PrunableModel& model);

/// Per-layer reconstruction errors of `pruned` against `dense`, with X_l
/// taken from the dense model's trace on `data`.
std::vector<double> layer_reconstruction_errors(const PrunableModel& dense,
                                                const PrunableModel& pruned,
                                                const TokenBatch& data);

struct PruneReport {
    std::string method;  // "centralized" | "local_only" | "federated"
    // config echo
    std::string metric;
    std::string local_group;
    std::string server_group;  // "-" for baselines
    std::string strategy;      // "-" for baselines
    bool scaling = false;
    double sparsity = 0.0;
    std::uint32_t clients = 0;
    std::uint32_t samples = 0;
    std::uint64_t seed = 0;
    // measurements
    double perplexity = 0.0;
    double perplexity_spread = 0.0;  // stddev across clients (local_only only)
    std::vector<double> per_layer_recon_error;
    std::vector<double> realized_sparsity_per_layer;
    CommLedger comm;
    double wall_time_seconds = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// Report for a pruned model; checks the perplexity invariant (finite, >= 1).
PruneReport build_report(const PrunableModel& dense, const PrunableModel& pruned,
                         const TokenBatch& recon_inputs, const TokenBatch& heldout);

}  // namespace fedprune
