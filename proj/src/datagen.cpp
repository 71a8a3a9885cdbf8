#include "fedprune/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fedprune/errors.hpp"
#include "fedprune/rng.hpp"

namespace fedprune {

Matrix markov_transition(std::uint32_t vocab, std::uint64_t seed) {
    if (vocab < 2) throw InputDomainError("markov_transition: vocab must be >= 2");
    Rng rng(mix_seed(seed, 0xA1));
    Matrix t(vocab, vocab);
    for (std::size_t r = 0; r < vocab; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < vocab; ++c) {
            // Squared exponentials give peaky rows, so the chain carries
            // enough structure for a bigram model to learn.
            double e = -std::log(1.0 - rng.uniform());
            double v = e * e;
            t(r, c) = v;
            sum += v;
        }
        for (std::size_t c = 0; c < vocab; ++c) t(r, c) /= sum;
    }
    return t;
}

TokenBatch sample_chain(const Matrix& transition, std::uint32_t n, std::uint32_t len,
                        std::uint64_t seed) {
    if (transition.rows() != transition.cols() || transition.rows() < 2) {
        throw InputDomainError("sample_chain: transition matrix must be square, >= 2 states");
    }
    if (len < 2) throw InputDomainError("sample_chain: sample_len must be >= 2");
    const auto vocab = static_cast<std::uint32_t>(transition.rows());
    Rng rng(mix_seed(seed, 0xB2));
    TokenBatch batch(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        TokenSeq& seq = batch[i];
        seq.resize(len);
        seq[0] = static_cast<std::int32_t>(rng.below(vocab));
        for (std::uint32_t t = 1; t < len; ++t) {
            const double* row = transition.data() + static_cast<std::size_t>(seq[t - 1]) * vocab;
            double u = rng.uniform();
            std::uint32_t next = vocab - 1;
            double acc = 0.0;
            for (std::uint32_t c = 0; c < vocab; ++c) {
                acc += row[c];
                if (u < acc) {
                    next = c;
                    break;
                }
            }
            seq[t] = static_cast<std::int32_t>(next);
        }
    }
    return batch;
}

Corpus generate_corpus(const CorpusParams& params, std::uint64_t seed) {
    if (params.vocab < 2) throw InputDomainError("generate_corpus: vocab must be >= 2");
    if (params.sample_len < 2) throw InputDomainError("generate_corpus: sample_len must be >= 2");
    if (params.calibration_samples == 0) {
        throw InputDomainError("generate_corpus: need at least one calibration sample");
    }
    const Matrix t = markov_transition(params.vocab, mix_seed(seed, 1));
    Corpus corpus;
    corpus.vocab = params.vocab;
    corpus.seed = seed;
    corpus.training = sample_chain(t, params.training_samples, params.sample_len, mix_seed(seed, 2));
    corpus.calibration =
        sample_chain(t, params.calibration_samples, params.sample_len, mix_seed(seed, 3));
    corpus.heldout = sample_chain(t, params.heldout_samples, params.sample_len, mix_seed(seed, 4));
    return corpus;
}

Corpus generate_corpus(std::uint32_t vocab, std::uint32_t n_samples, std::uint32_t sample_len,
                       std::uint64_t seed) {
    CorpusParams params;
    params.vocab = vocab;
    params.calibration_samples = n_samples;
    params.sample_len = sample_len;
    params.heldout_samples = std::max<std::uint32_t>(4, n_samples / 4);
    params.training_samples = std::max<std::uint32_t>(32, n_samples);
    return generate_corpus(params, seed);
}

namespace {

struct FlatBatch {
    std::vector<std::int32_t> tokens;   // all tokens, row per token
    std::vector<std::int32_t> targets;  // next token, or -1 at sequence ends
    std::size_t prediction_count = 0;
};

FlatBatch flatten(const TokenBatch& batch) {
    FlatBatch flat;
    for (const TokenSeq& seq : batch) {
        for (std::size_t t = 0; t < seq.size(); ++t) {
            flat.tokens.push_back(seq[t]);
            if (t + 1 < seq.size()) {
                flat.targets.push_back(seq[t + 1]);
                ++flat.prediction_count;
            } else {
                flat.targets.push_back(-1);
            }
        }
    }
    return flat;
}

double nonlinearity_grad_from_value(Nonlinearity f, double a) {
    switch (f) {
        case Nonlinearity::ReLU: return a > 0.0 ? 1.0 : 0.0;
        case Nonlinearity::Tanh: return 1.0 - a * a;
    }
    return 1.0;
}

// Row-wise softmax cross-entropy; fills dlogits (scaled by 1/P) and
// returns the mean NLL over prediction rows.
double softmax_xent(const Matrix& logits, const std::vector<std::int32_t>& targets,
                    std::size_t prediction_count, Matrix* dlogits) {
    const std::size_t n = logits.rows(), v = logits.cols();
    double total = 0.0;
    const double inv_p = 1.0 / static_cast<double>(prediction_count);
    for (std::size_t r = 0; r < n; ++r) {
        if (targets[r] < 0) continue;
        const double* lr = logits.data() + r * v;
        double mx = lr[0];
        for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, lr[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < v; ++j) z += std::exp(lr[j] - mx);
        const double lse = std::log(z) + mx;
        total += lse - lr[static_cast<std::size_t>(targets[r])];
        if (dlogits != nullptr) {
            double* dr = dlogits->data() + r * v;
            for (std::size_t j = 0; j < v; ++j) dr[j] = std::exp(lr[j] - mx) / z * inv_p;
            dr[static_cast<std::size_t>(targets[r])] -= inv_p;
        }
    }
    return total * inv_p;
}

}  // namespace

double next_token_loss(const PrunableModel& model, const TokenBatch& batch) {
    FlatBatch flat = flatten(batch);
    if (flat.prediction_count == 0) {
        throw InputDomainError("next_token_loss: batch has no next-token targets");
    }
    Matrix logits = forward_logits(model, batch);
    return softmax_xent(logits, flat.targets, flat.prediction_count, nullptr);
}

PrunableModel train_reference_model(const Corpus& corpus, const ModelDims& dims,
                                    const TrainParams& params, std::uint64_t seed,
                                    std::vector<double>* loss_history) {
    std::vector<std::size_t> layer_dims(dims.layer_out_dims.begin(), dims.layer_out_dims.end());
    PrunableModel model = make_seeded_model(corpus.vocab, dims.embed_dim, layer_dims, seed);
    if (params.epochs == 0) return model;
    if (corpus.training.empty()) {
        throw InputDomainError("train_reference_model: corpus has no training split");
    }

    const FlatBatch flat = flatten(corpus.training);
    if (flat.prediction_count == 0) {
        throw InputDomainError("train_reference_model: training split has no targets");
    }
    const std::size_t n = flat.tokens.size();
    const std::size_t num_layers = model.layers.size();
    const double lr = params.learning_rate;

    for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
        // forward, keeping every layer input
        std::vector<Matrix> acts;  // acts[l] = input to layer l; acts[L] = head input
        acts.reserve(num_layers + 1);
        {
            Matrix x(n, model.embedding.cols());
            for (std::size_t r = 0; r < n; ++r) {
                const double* src = model.embedding.data() +
                                    static_cast<std::size_t>(flat.tokens[r]) * model.embedding.cols();
                std::copy(src, src + model.embedding.cols(), x.data() + r * model.embedding.cols());
            }
            acts.push_back(std::move(x));
        }
        for (std::size_t l = 0; l < num_layers; ++l) {
            acts.push_back(forward_partial(model, acts[l], l));
        }
        Matrix logits = head_logits(model, acts[num_layers]);

        Matrix dlogits(logits.rows(), logits.cols());
        const double loss = softmax_xent(logits, flat.targets, flat.prediction_count, &dlogits);
        if (!std::isfinite(loss)) {
            throw NumericalError("train_reference_model: loss diverged at epoch " +
                                 std::to_string(epoch));
        }
        if (loss_history != nullptr) loss_history->push_back(loss);

        // backward
        Matrix d_head = matmul_tn(acts[num_layers], dlogits);
        Matrix d_act = matmul_nt(dlogits, model.head);  // gradient w.r.t. head input
        std::vector<Matrix> d_weights(num_layers);
        for (std::size_t l = num_layers; l-- > 0;) {
            if (l + 1 < num_layers) {
                // pre-head layers have the nonlinearity; derivative from the
                // activation value works for both relu and tanh
                const Matrix& a_next = acts[l + 1];
                for (std::size_t i = 0; i < d_act.size(); ++i) {
                    d_act.data()[i] *=
                        nonlinearity_grad_from_value(model.nonlinearity, a_next.values()[i]);
                }
            }
            d_weights[l] = matmul_tn(d_act, acts[l]);
            if (l > 0) d_act = matmul_nn(d_act, model.layers[l].weights);
        }
        Matrix d_embed_rows = matmul_nn(d_act, model.layers[0].weights);

        // descend
        for (std::size_t i = 0; i < model.head.size(); ++i) {
            model.head.data()[i] -= lr * d_head.values()[i];
        }
        for (std::size_t l = 0; l < num_layers; ++l) {
            Matrix& w = model.layers[l].weights;
            for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] -= lr * d_weights[l].values()[i];
        }
        for (std::size_t r = 0; r < n; ++r) {
            double* dst = model.embedding.data() +
                          static_cast<std::size_t>(flat.tokens[r]) * model.embedding.cols();
            const double* src = d_embed_rows.data() + r * model.embedding.cols();
            for (std::size_t j = 0; j < model.embedding.cols(); ++j) dst[j] -= lr * src[j];
        }
    }
    ensure_finite(model.embedding, "trained embedding");
    ensure_finite(model.head, "trained head");
    for (const LinearLayer& layer : model.layers) ensure_finite(layer.weights, "trained layer");
    return model;
}

std::vector<TokenBatch> partition(const TokenBatch& samples, std::uint32_t m, std::uint64_t seed) {
    if (m == 0) throw InputDomainError("partition: client count must be >= 1");
    if (m > samples.size()) {
        throw InputDomainError("partition: " + std::to_string(m) + " clients exceed " +
                               std::to_string(samples.size()) + " samples");
    }
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, 0xC3));
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    std::vector<TokenBatch> shards(m);
    for (std::size_t i = 0; i < order.size(); ++i) {
        shards[i % m].push_back(samples[order[i]]);
    }
    return shards;
}

std::string corpus_to_json(const Corpus& corpus) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["vocab"] = corpus.vocab;
    j["seed"] = corpus.seed;
    j["training"] = corpus.training;
    j["calibration"] = corpus.calibration;
    j["heldout"] = corpus.heldout;
    return j.dump();
}

Corpus corpus_from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("format_version").get<int>() != 1) {
            throw FormatError("corpus: unsupported format version");
        }
        Corpus corpus;
        corpus.vocab = j.at("vocab").get<std::uint32_t>();
        corpus.seed = j.at("seed").get<std::uint64_t>();
        corpus.training = j.at("training").get<TokenBatch>();
        corpus.calibration = j.at("calibration").get<TokenBatch>();
        corpus.heldout = j.at("heldout").get<TokenBatch>();
        return corpus;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("corpus: ") + e.what());
    }
}

}  // namespace fedprune
