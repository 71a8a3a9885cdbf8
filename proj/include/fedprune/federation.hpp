#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedprune/datagen.hpp"
#include "fedprune/masking.hpp"
#include "fedprune/metrics.hpp"
#include "fedprune/model.hpp"

namespace fedprune {

enum class Strategy { OneShot, Iterative };

Strategy strategy_from_name(std::string_view name);
std::string_view strategy_name(Strategy s);

struct PruneConfig {
    double sparsity = 0.5;
    Metric metric = Metric::Wanda;
    ComparisonGroup local_group = ComparisonGroup::Row;
    ComparisonGroup server_group = ComparisonGroup::Layer;
    Strategy strategy = Strategy::OneShot;
    bool scaling = false;
    std::uint32_t clients = 1;
    std::uint64_t seed = 0;
    double ria_alpha = 0.5;
    std::string sparsegpt_lambda_rule = "default";

    MetricParams metric_params() const { return {ria_alpha, sparsegpt_lambda_rule}; }
    void validate() const;
};

/// One client: a private calibration shard plus a working model copy the
/// client prunes and propagates through.
struct ClientState {
    std::uint32_t client_id = 0;
    TokenBatch calibration;
    PrunableModel model_copy;
};

std::vector<ClientState> make_clients(const PrunableModel& global_model,
                                      const std::vector<TokenBatch>& shards);

/// Mask-payload bits moved over the simulated wire. Counts logical payload
/// bits (one per mask entry, vote_bit_width(m) per vote entry); frame
/// headers and byte padding are transport overhead and excluded.
struct CommLedger {
    std::uint64_t uplink_bits = 0;
    std::uint64_t downlink_bits = 0;
    std::uint64_t rounds = 0;
};

struct FederatedResult {
    PrunableModel model;
    CommLedger ledger;
    std::vector<MaskMatrix> final_masks;       // per layer
    std::vector<AggregatedMask> layer_votes;   // per layer
};

struct CentralizedResult {
    PrunableModel model;
    std::vector<MaskMatrix> masks;  // per layer
};

/// Local pass of one-shot pruning: score layer l from the client's current
/// activations, mask it, apply the mask to the client's own copy, propagate.
/// Returns all layer masks; the model copy ends locally pruned.
std::vector<MaskMatrix> client_local_masks_oneshot(ClientState& client,
                                                   const PruneConfig& config);

/// Clients upload all layer masks once; the server aggregates, selects per
/// layer with the server group, prunes the global model, and optionally
/// applies consensus scaling. One communication round, no downlink.
FederatedResult run_oneshot(const PrunableModel& global_model, std::vector<ClientState>& clients,
                            const PruneConfig& config);

/// Layer-by-layer protocol: upload masks for layer l, aggregate and prune
/// globally, broadcast the final mask (plus vote counts when scaling) back,
/// clients apply it and propagate. One round per layer.
FederatedResult run_iterative(const PrunableModel& global_model, std::vector<ClientState>& clients,
                              const PruneConfig& config);

/// Upper-bound baseline: one scorer holding the pooled calibration set,
/// local-group semantics, no voting.
CentralizedResult run_centralized(const PrunableModel& global_model,
                                  const TokenBatch& pooled_calibration,
                                  const PruneConfig& config);

/// Baseline without collaboration: every client runs the centralized
/// procedure on its own shard.
std::vector<CentralizedResult> run_local_only(const PrunableModel& global_model,
                                              std::vector<ClientState>& clients,
                                              const PruneConfig& config);

}  // namespace fedprune
