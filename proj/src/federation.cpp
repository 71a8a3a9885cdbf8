#include "fedprune/federation.hpp"

#include <string>
#include <utility>

#include "fedprune/errors.hpp"
#include "fedprune/parallel.hpp"

namespace fedprune {

Strategy strategy_from_name(std::string_view name) {
    if (name == "oneshot") return Strategy::OneShot;
    if (name == "iterative") return Strategy::Iterative;
    throw InputDomainError("unknown strategy: " + std::string(name));
}

std::string_view strategy_name(Strategy s) {
    return s == Strategy::OneShot ? "oneshot" : "iterative";
}

void PruneConfig::validate() const {
    if (sparsity < 0.0 || sparsity > 1.0) {
        throw InputDomainError("config: sparsity must lie in [0,1]");
    }
    if (clients < 1) throw InputDomainError("config: need at least one client");
    if (!(ria_alpha >= 0.0)) throw InputDomainError("config: ria_alpha must be >= 0");
}

std::vector<ClientState> make_clients(const PrunableModel& global_model,
                                      const std::vector<TokenBatch>& shards) {
    std::vector<ClientState> clients;
    clients.reserve(shards.size());
    for (std::size_t i = 0; i < shards.size(); ++i) {
        if (shards[i].empty()) {
            throw InputDomainError("make_clients: shard " + std::to_string(i) + " is empty");
        }
        clients.push_back({static_cast<std::uint32_t>(i), shards[i], global_model});
    }
    return clients;
}

namespace {

// Shared layer-by-layer local procedure: score with the caller's current
// activations, mask, apply, propagate. Used by clients and the centralized
// baseline alike.
std::vector<MaskMatrix> prune_in_place(PrunableModel& model, const TokenBatch& calibration,
                                       double sparsity, Metric metric, ComparisonGroup group,
                                       const MetricParams& params) {
    std::vector<MaskMatrix> masks;
    masks.reserve(model.layers.size());
    Matrix x = embed_tokens(model, calibration);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const ImportanceScores scores = score_layer(model.layers[l].weights, x, metric, params);
        MaskMatrix mask = mask_from_scores(scores.values, sparsity, group);
        apply_mask_inplace(model.layers[l], mask);
        x = forward_partial(model, x, l);
        masks.push_back(std::move(mask));
    }
    return masks;
}

void check_layer_frame(const MaskFrame& frame, const PrunableModel& model, std::size_t layer,
                       std::uint32_t client_id) {
    const Matrix& w = model.layers[layer].weights;
    if (frame.layer_index != layer || frame.client_id != client_id ||
        frame.rows != w.rows() || frame.cols != w.cols()) {
        throw ProtocolError("client " + std::to_string(client_id) +
                            " sent an inconsistent mask frame for layer " + std::to_string(layer));
    }
}

}  // namespace

std::vector<MaskMatrix> client_local_masks_oneshot(ClientState& client,
                                                   const PruneConfig& config) {
    config.validate();
    return prune_in_place(client.model_copy, client.calibration, config.sparsity, config.metric,
                          config.local_group, config.metric_params());
}

FederatedResult run_oneshot(const PrunableModel& global_model, std::vector<ClientState>& clients,
                            const PruneConfig& config) {
    config.validate();
    if (clients.size() != config.clients) {
        throw InputDomainError("run_oneshot: config expects " + std::to_string(config.clients) +
                               " clients, got " + std::to_string(clients.size()));
    }
    const std::size_t num_layers = global_model.layers.size();

    // Round 1, client side: everything the server will see goes through the
    // wire encoding. uploads[i][l] is client i's frame for layer l.
    std::vector<std::vector<std::vector<std::uint8_t>>> uploads(clients.size());
    parallel_for(clients.size(), [&](std::size_t i) {
        std::vector<MaskMatrix> masks = client_local_masks_oneshot(clients[i], config);
        uploads[i].reserve(masks.size());
        for (std::size_t l = 0; l < masks.size(); ++l) {
            uploads[i].push_back(encode_mask_frame(static_cast<std::uint32_t>(l),
                                                   clients[i].client_id, masks[l]));
        }
    });

    FederatedResult result;
    result.model = global_model;
    result.ledger.rounds = 1;
    result.final_masks.reserve(num_layers);
    result.layer_votes.reserve(num_layers);

    // Server side: aggregate, select, prune, optionally scale.
    for (std::size_t l = 0; l < num_layers; ++l) {
        std::vector<MaskMatrix> layer_masks;
        layer_masks.reserve(clients.size());
        for (std::size_t i = 0; i < clients.size(); ++i) {
            MaskFrame frame = decode_mask_frame(uploads[i][l]);
            check_layer_frame(frame, result.model, l, clients[i].client_id);
            result.ledger.uplink_bits += static_cast<std::uint64_t>(frame.rows) * frame.cols;
            layer_masks.push_back(std::move(frame.mask));
        }
        AggregatedMask votes = aggregate_masks(layer_masks);
        MaskMatrix final_mask = select_final_mask(votes, config.sparsity, config.server_group);
        apply_mask_inplace(result.model.layers[l], final_mask);
        if (config.scaling) {
            result.model.layers[l].weights =
                scale_retained(result.model.layers[l].weights, votes, final_mask);
        }
        result.final_masks.push_back(std::move(final_mask));
        result.layer_votes.push_back(std::move(votes));
    }
    return result;
}

FederatedResult run_iterative(const PrunableModel& global_model, std::vector<ClientState>& clients,
                              const PruneConfig& config) {
    config.validate();
    if (clients.size() != config.clients) {
        throw InputDomainError("run_iterative: config expects " + std::to_string(config.clients) +
                               " clients, got " + std::to_string(clients.size()));
    }
    const std::size_t num_layers = global_model.layers.size();
    const auto m = static_cast<std::uint32_t>(clients.size());

    FederatedResult result;
    result.model = global_model;
    result.ledger.rounds = num_layers;

    // Per-client activations at the current layer.
    std::vector<Matrix> acts(clients.size());
    parallel_for(clients.size(), [&](std::size_t i) {
        acts[i] = embed_tokens(clients[i].model_copy, clients[i].calibration);
    });

    for (std::size_t l = 0; l < num_layers; ++l) {
        // Clients score their current activations and upload layer-l masks.
        std::vector<std::vector<std::uint8_t>> uploads(clients.size());
        parallel_for(clients.size(), [&](std::size_t i) {
            const ImportanceScores scores = score_layer(clients[i].model_copy.layers[l].weights,
                                                        acts[i], config.metric,
                                                        config.metric_params());
            MaskMatrix mask = mask_from_scores(scores.values, config.sparsity, config.local_group);
            uploads[i] = encode_mask_frame(static_cast<std::uint32_t>(l), clients[i].client_id,
                                           mask);
        });

        std::vector<MaskMatrix> layer_masks;
        layer_masks.reserve(clients.size());
        for (std::size_t i = 0; i < clients.size(); ++i) {
            MaskFrame frame = decode_mask_frame(uploads[i]);
            check_layer_frame(frame, result.model, l, clients[i].client_id);
            result.ledger.uplink_bits += static_cast<std::uint64_t>(frame.rows) * frame.cols;
            layer_masks.push_back(std::move(frame.mask));
        }
        AggregatedMask votes = aggregate_masks(layer_masks);
        MaskMatrix final_mask = select_final_mask(votes, config.sparsity, config.server_group);
        apply_mask_inplace(result.model.layers[l], final_mask);
        if (config.scaling) {
            result.model.layers[l].weights =
                scale_retained(result.model.layers[l].weights, votes, final_mask);
        }

        // Broadcast the final mask (and vote counts when scaling) to every
        // client; clients prune their own layer l the global way, then
        // propagate their activations through it.
        const std::vector<std::uint8_t> mask_wire = encode_mask_frame(
            static_cast<std::uint32_t>(l), 0xffffffffu, final_mask);
        const std::vector<std::uint8_t> vote_wire =
            config.scaling ? pack_votes(votes) : std::vector<std::uint8_t>{};
        const std::uint64_t entries =
            static_cast<std::uint64_t>(final_mask.rows) * final_mask.cols;
        result.ledger.downlink_bits += static_cast<std::uint64_t>(clients.size()) * entries;
        if (config.scaling) {
            result.ledger.downlink_bits +=
                static_cast<std::uint64_t>(clients.size()) * entries * vote_bit_width(m);
        }
        parallel_for(clients.size(), [&](std::size_t i) {
            MaskFrame frame = decode_mask_frame(mask_wire);
            LinearLayer& layer = clients[i].model_copy.layers[l];
            apply_mask_inplace(layer, frame.mask);
            if (config.scaling) {
                AggregatedMask client_votes =
                    unpack_votes(vote_wire, frame.rows, frame.cols, m);
                layer.weights = scale_retained(layer.weights, client_votes, frame.mask);
            }
            acts[i] = forward_partial(clients[i].model_copy, acts[i], l);
        });

        result.final_masks.push_back(std::move(final_mask));
        result.layer_votes.push_back(std::move(votes));
    }
    return result;
}

CentralizedResult run_centralized(const PrunableModel& global_model,
                                  const TokenBatch& pooled_calibration,
                                  const PruneConfig& config) {
    config.validate();
    CentralizedResult result;
    result.model = global_model;
    result.masks = prune_in_place(result.model, pooled_calibration, config.sparsity, config.metric,
                                  config.local_group, config.metric_params());
    return result;
}

std::vector<CentralizedResult> run_local_only(const PrunableModel& global_model,
                                              std::vector<ClientState>& clients,
                                              const PruneConfig& config) {
    config.validate();
    std::vector<CentralizedResult> results(clients.size());
    parallel_for(clients.size(), [&](std::size_t i) {
        results[i].model = global_model;
        results[i].masks =
            prune_in_place(results[i].model, clients[i].calibration, config.sparsity,
                           config.metric, config.local_group, config.metric_params());
        clients[i].model_copy = results[i].model;
    });
    return results;
}

}  // namespace fedprune
