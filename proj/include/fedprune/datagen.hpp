#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedprune/matrix.hpp"
#include "fedprune/model.hpp"

namespace fedprune {

/// Synthetic token corpus. Each sample belongs to exactly one split:
/// training feeds the reference-model trainer, calibration is what gets
/// sharded across clients, heldout is for perplexity only.
struct Corpus {
    std::uint32_t vocab = 0;
    std::uint64_t seed = 0;
    TokenBatch training;
    TokenBatch calibration;
    TokenBatch heldout;
};

struct CorpusParams {
    std::uint32_t vocab = 32;
    std::uint32_t calibration_samples = 128;
    std::uint32_t sample_len = 64;
    std::uint32_t heldout_samples = 32;
    std::uint32_t training_samples = 128;
};

/// Row-stochastic transition matrix with seeded random rows.
Matrix markov_transition(std::uint32_t vocab, std::uint64_t seed);

/// Samples `n` sequences of length `len` from the chain (seeded start states).
TokenBatch sample_chain(const Matrix& transition, std::uint32_t n, std::uint32_t len,
                        std::uint64_t seed);

Corpus generate_corpus(const CorpusParams& params, std::uint64_t seed);

/// Convenience form: heldout and training sizes derived from n_samples.
Corpus generate_corpus(std::uint32_t vocab, std::uint32_t n_samples, std::uint32_t sample_len,
                       std::uint64_t seed);

struct ModelDims {
    std::uint32_t embed_dim = 32;
    std::vector<std::size_t> layer_out_dims = {64, 64};
};

struct TrainParams {
    std::uint32_t epochs = 60;
    double learning_rate = 0.5;
};

/// Full-batch gradient descent on next-token cross-entropy over the
/// training split. epochs = 0 returns the seeded initialization.
/// Throws NumericalError if the loss diverges.
PrunableModel train_reference_model(const Corpus& corpus, const ModelDims& dims,
                                    const TrainParams& params, std::uint64_t seed,
                                    std::vector<double>* loss_history = nullptr);

/// Mean next-token cross-entropy of the model on a batch (natural log).
double next_token_loss(const PrunableModel& model, const TokenBatch& batch);

/// Seeded shuffle then round-robin deal: m disjoint shards covering all
/// samples, sizes differing by at most one.
std::vector<TokenBatch> partition(const TokenBatch& samples, std::uint32_t m, std::uint64_t seed);

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);

}  // namespace fedprune
