#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fedprune/masking.hpp"
#include "fedprune/matrix.hpp"

namespace fedprune {

using TokenSeq = std::vector<std::int32_t>;
using TokenBatch = std::vector<TokenSeq>;

enum class Nonlinearity { ReLU, Tanh };

Nonlinearity nonlinearity_from_name(std::string_view name);
std::string_view nonlinearity_name(Nonlinearity f);
double apply_nonlinearity(Nonlinearity f, double x);

/// One prunable dense layer; weights are d_out × d_in, forward is x·Wᵀ.
struct LinearLayer {
    Matrix weights;
    std::size_t layer_index = 0;

    std::size_t d_out() const { return weights.rows(); }
    std::size_t d_in() const { return weights.cols(); }
};

/// Token embedding → stack of dense layers (nonlinearity after each except
/// the last) → linear head. Embedding and head are never pruned.
struct PrunableModel {
    Matrix embedding;                 // vocab × d_0
    std::vector<LinearLayer> layers;  // prunable
    Matrix head;                      // d_last × vocab
    Nonlinearity nonlinearity = Nonlinearity::ReLU;

    std::size_t vocab() const { return embedding.rows(); }
    std::size_t layer_count() const { return layers.size(); }

    /// Checks dimension composition and layer index contiguity.
    void validate() const;
};

/// Inputs captured at each prunable layer during one forward pass;
/// entry l is the (tokens × d_in) matrix fed to layer l.
struct ActivationTrace {
    std::vector<Matrix> per_layer_inputs;
};

struct ForwardResult {
    Matrix logits;  // tokens × vocab
    ActivationTrace trace;
};

/// Embedding rows for every token of the batch, flattened row-major
/// (sequence by sequence). Rejects empty batches and out-of-range ids.
Matrix embed_tokens(const PrunableModel& model, const TokenBatch& batch);

ForwardResult forward_with_trace(const PrunableModel& model, const TokenBatch& batch);

/// Forward logits without keeping the trace.
Matrix forward_logits(const PrunableModel& model, const TokenBatch& batch);

/// One layer step: nonlinearity(x·Wᵀ) for pre-head layers, the raw product
/// for the last layer. Lets callers re-propagate after in-place pruning.
Matrix forward_partial(const PrunableModel& model, const Matrix& trace_entry,
                       std::size_t from_layer);

/// Head projection applied to the last layer's output.
Matrix head_logits(const PrunableModel& model, const Matrix& last_layer_output);

/// W ← W ⊙ (1 − M). Entries with M = 0 are untouched bit-for-bit.
void apply_mask_inplace(LinearLayer& layer, const MaskMatrix& mask);

/// Seeded Gaussian model: layers scaled by 1/sqrt(d_in), embedding unit
/// variance, head scaled by 1/sqrt(d_last).
PrunableModel make_seeded_model(std::size_t vocab, std::size_t embed_dim,
                                const std::vector<std::size_t>& layer_out_dims,
                                std::uint64_t seed,
                                Nonlinearity nonlinearity = Nonlinearity::ReLU);

/// Versioned JSON checkpoint (dims, seed, nonlinearity, raw weights).
std::string model_to_json(const PrunableModel& model, std::uint64_t seed);
PrunableModel model_from_json(const std::string& text);

}  // namespace fedprune
