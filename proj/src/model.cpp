#include "fedprune/model.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "fedprune/errors.hpp"
#include "fedprune/rng.hpp"

namespace fedprune {

Nonlinearity nonlinearity_from_name(std::string_view name) {
    if (name == "relu") return Nonlinearity::ReLU;
    if (name == "tanh") return Nonlinearity::Tanh;
    throw InputDomainError("unknown nonlinearity: " + std::string(name));
}

std::string_view nonlinearity_name(Nonlinearity f) {
    switch (f) {
        case Nonlinearity::ReLU: return "relu";
        case Nonlinearity::Tanh: return "tanh";
    }
    return "?";
}

double apply_nonlinearity(Nonlinearity f, double x) {
    switch (f) {
        case Nonlinearity::ReLU: return x > 0.0 ? x : 0.0;
        case Nonlinearity::Tanh: return std::tanh(x);
    }
    return x;
}

void PrunableModel::validate() const {
    if (embedding.rows() == 0 || embedding.cols() == 0) {
        throw ShapeError("model: empty embedding");
    }
    if (layers.empty()) throw ShapeError("model: no prunable layers");
    std::size_t expected_in = embedding.cols();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LinearLayer& layer = layers[l];
        if (layer.layer_index != l) {
            throw ShapeError("model: layer_index not contiguous at position " + std::to_string(l));
        }
        if (layer.d_in() == 0 || layer.d_out() == 0) {
            throw ShapeError("model: degenerate layer " + std::to_string(l));
        }
        if (layer.d_in() != expected_in) {
            throw ShapeError("model: layer " + std::to_string(l) + " expects input dim " +
                             std::to_string(layer.d_in()) + " but previous stage produces " +
                             std::to_string(expected_in));
        }
        expected_in = layer.d_out();
    }
    if (head.rows() != expected_in) {
        throw ShapeError("model: head input dim " + std::to_string(head.rows()) +
                         " vs last layer output " + std::to_string(expected_in));
    }
    if (head.cols() != embedding.rows()) {
        throw ShapeError("model: head output dim does not match vocab");
    }
}

Matrix embed_tokens(const PrunableModel& model, const TokenBatch& batch) {
    std::size_t total = 0;
    for (const TokenSeq& seq : batch) total += seq.size();
    if (batch.empty() || total == 0) {
        throw InputDomainError("embed_tokens: empty token batch");
    }
    const std::size_t vocab = model.vocab();
    const std::size_t d0 = model.embedding.cols();
    Matrix x(total, d0);
    std::size_t row = 0;
    for (const TokenSeq& seq : batch) {
        for (std::int32_t tok : seq) {
            if (tok < 0 || static_cast<std::size_t>(tok) >= vocab) {
                throw InputDomainError("token id " + std::to_string(tok) +
                                       " out of range for vocab " + std::to_string(vocab));
            }
            const double* src = model.embedding.data() + static_cast<std::size_t>(tok) * d0;
            double* dst = x.data() + row * d0;
            for (std::size_t j = 0; j < d0; ++j) dst[j] = src[j];
            ++row;
        }
    }
    return x;
}

Matrix forward_partial(const PrunableModel& model, const Matrix& trace_entry,
                       std::size_t from_layer) {
    if (from_layer >= model.layers.size()) {
        throw InputDomainError("forward_partial: layer index out of range");
    }
    const LinearLayer& layer = model.layers[from_layer];
    if (trace_entry.cols() != layer.d_in()) {
        throw ShapeError("forward_partial: input cols " + std::to_string(trace_entry.cols()) +
                         " vs layer d_in " + std::to_string(layer.d_in()));
    }
    Matrix out = matmul_nt(trace_entry, layer.weights);
    if (from_layer + 1 < model.layers.size()) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out.data()[i] = apply_nonlinearity(model.nonlinearity, out.data()[i]);
        }
    }
    return out;
}

Matrix head_logits(const PrunableModel& model, const Matrix& last_layer_output) {
    return matmul_nn(last_layer_output, model.head);
}

ForwardResult forward_with_trace(const PrunableModel& model, const TokenBatch& batch) {
    ForwardResult result;
    Matrix x = embed_tokens(model, batch);
    result.trace.per_layer_inputs.reserve(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        result.trace.per_layer_inputs.push_back(x);
        x = forward_partial(model, x, l);
    }
    result.logits = head_logits(model, x);
    ensure_finite(result.logits, "forward logits");
    return result;
}

Matrix forward_logits(const PrunableModel& model, const TokenBatch& batch) {
    Matrix x = embed_tokens(model, batch);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        x = forward_partial(model, x, l);
    }
    Matrix logits = head_logits(model, x);
    ensure_finite(logits, "forward logits");
    return logits;
}

void apply_mask_inplace(LinearLayer& layer, const MaskMatrix& mask) {
    if (mask.rows != layer.weights.rows() || mask.cols != layer.weights.cols()) {
        throw ShapeError("apply_mask_inplace: mask " + std::to_string(mask.rows) + "x" +
                         std::to_string(mask.cols) + " vs weights " +
                         std::to_string(layer.weights.rows()) + "x" +
                         std::to_string(layer.weights.cols()));
    }
    double* w = layer.weights.data();
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
        if (mask.bits[i]) w[i] = 0.0;
    }
}

PrunableModel make_seeded_model(std::size_t vocab, std::size_t embed_dim,
                                const std::vector<std::size_t>& layer_out_dims,
                                std::uint64_t seed, Nonlinearity nonlinearity) {
    if (vocab < 2 || embed_dim == 0 || layer_out_dims.empty()) {
        throw InputDomainError("make_seeded_model: degenerate dimensions");
    }
    PrunableModel model;
    model.nonlinearity = nonlinearity;
    {
        Rng rng(mix_seed(seed, 0x11));
        model.embedding = Matrix(vocab, embed_dim);
        for (std::size_t i = 0; i < model.embedding.size(); ++i) {
            model.embedding.data()[i] = rng.gaussian();
        }
    }
    std::size_t d_in = embed_dim;
    for (std::size_t l = 0; l < layer_out_dims.size(); ++l) {
        Rng rng(mix_seed(seed, 0x100 + l));
        LinearLayer layer;
        layer.layer_index = l;
        layer.weights = Matrix(layer_out_dims[l], d_in);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
        for (std::size_t i = 0; i < layer.weights.size(); ++i) {
            layer.weights.data()[i] = scale * rng.gaussian();
        }
        model.layers.push_back(std::move(layer));
        d_in = layer_out_dims[l];
    }
    {
        Rng rng(mix_seed(seed, 0x22));
        model.head = Matrix(d_in, vocab);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
        for (std::size_t i = 0; i < model.head.size(); ++i) {
            model.head.data()[i] = scale * rng.gaussian();
        }
    }
    model.validate();
    return model;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
}

}  // namespace

std::string model_to_json(const PrunableModel& model, std::uint64_t seed) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["seed"] = seed;
    j["nonlinearity"] = std::string(nonlinearity_name(model.nonlinearity));
    j["embedding"] = matrix_to_json(model.embedding);
    j["head"] = matrix_to_json(model.head);
    j["layers"] = nlohmann::json::array();
    for (const LinearLayer& layer : model.layers) {
        j["layers"].push_back(matrix_to_json(layer.weights));
    }
    return j.dump();
}

PrunableModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model checkpoint: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw FormatError("model checkpoint: unsupported format version");
        }
        PrunableModel model;
        model.nonlinearity = nonlinearity_from_name(j.at("nonlinearity").get<std::string>());
        model.embedding = matrix_from_json(j.at("embedding"));
        model.head = matrix_from_json(j.at("head"));
        std::size_t idx = 0;
        for (const auto& lj : j.at("layers")) {
            model.layers.push_back({matrix_from_json(lj), idx++});
        }
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model checkpoint: ") + e.what());
    }
}

}  // namespace fedprune
