#include "fedprune/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "fedprune/errors.hpp"

namespace fedprune {

double perplexity(const PrunableModel& model, const TokenBatch& heldout) {
    if (heldout.empty()) throw InputDomainError("perplexity: empty held-out batch");
    const Matrix logits = forward_logits(model, heldout);
    const std::size_t vocab = logits.cols();
    double total_nll = 0.0;
    std::size_t predictions = 0;
    std::size_t row = 0;
    for (const TokenSeq& seq : heldout) {
        for (std::size_t t = 0; t < seq.size(); ++t, ++row) {
            if (t + 1 == seq.size()) continue;
            const double* lr = logits.data() + row * vocab;
            double mx = lr[0];
            for (std::size_t j = 1; j < vocab; ++j) mx = std::max(mx, lr[j]);
            double z = 0.0;
            for (std::size_t j = 0; j < vocab; ++j) z += std::exp(lr[j] - mx);
            total_nll += std::log(z) + mx - lr[static_cast<std::size_t>(seq[t + 1])];
            ++predictions;
        }
    }
    if (predictions == 0) {
        throw InputDomainError("perplexity: held-out batch has no next-token targets");
    }
    return std::exp(total_nll / static_cast<double>(predictions));
}

double reconstruction_error(const Matrix& w, const Matrix& w_pruned, const Matrix& activations) {
    if (!w.same_shape(w_pruned)) {
        throw ShapeError("reconstruction_error: weight shapes differ");
    }
    if (activations.cols() != w.cols()) {
        throw ShapeError("reconstruction_error: activation cols " +
                         std::to_string(activations.cols()) + " vs weight cols " +
                         std::to_string(w.cols()));
    }
    Matrix diff(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.size(); ++i) {
        diff.data()[i] = w.values()[i] - w_pruned.values()[i];
    }
    return frobenius_sq(matmul_nt(diff, activations));
}

std::vector<double> realized_sparsity(const PrunableModel& model) {
    std::vector<double> out;
    out.reserve(model.layers.size());
    for (const LinearLayer& layer : model.layers) {
        std::size_t zeros = 0;
        for (double v : layer.weights.values()) {
            if (v == 0.0) ++zeros;
        }
        out.push_back(static_cast<double>(zeros) / static_cast<double>(layer.weights.size()));
    }
    return out;
}

std::vector<double> layer_reconstruction_errors(const PrunableModel& dense,
                                                const PrunableModel& pruned,
                                                const TokenBatch& data) {
    if (dense.layers.size() != pruned.layers.size()) {
        throw ShapeError("layer_reconstruction_errors: layer counts differ");
    }
    const ForwardResult fwd = forward_with_trace(dense, data);
    std::vector<double> errors;
    errors.reserve(dense.layers.size());
    for (std::size_t l = 0; l < dense.layers.size(); ++l) {
        errors.push_back(reconstruction_error(dense.layers[l].weights, pruned.layers[l].weights,
                                              fwd.trace.per_layer_inputs[l]));
    }
    return errors;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string PruneReport::csv_header() {
    return "method,metric,local_group,server_group,strategy,scaling,sparsity,clients,samples,"
           "seed,perplexity,mean_recon_error,uplink_bits,downlink_bits,rounds,wall_time";
}

std::string PruneReport::csv_row() const {
    double mean_err = 0.0;
    if (!per_layer_recon_error.empty()) {
        for (double e : per_layer_recon_error) mean_err += e;
        mean_err /= static_cast<double>(per_layer_recon_error.size());
    }
    std::string row;
    row += method + ',' + metric + ',' + local_group + ',' + server_group + ',' + strategy + ',';
    row += scaling ? "true," : "false,";
    row += fmt_double(sparsity) + ',' + std::to_string(clients) + ',' + std::to_string(samples) +
           ',' + std::to_string(seed) + ',';
    row += fmt_double(perplexity) + ',' + fmt_double(mean_err) + ',';
    row += std::to_string(comm.uplink_bits) + ',' + std::to_string(comm.downlink_bits) + ',' +
           std::to_string(comm.rounds) + ',';
    row += fmt_double(wall_time_seconds);
    return row;
}

PruneReport build_report(const PrunableModel& dense, const PrunableModel& pruned,
                         const TokenBatch& recon_inputs, const TokenBatch& heldout) {
    PruneReport report;
    report.perplexity = perplexity(pruned, heldout);
    if (!(std::isfinite(report.perplexity) && report.perplexity >= 1.0)) {
        throw NumericalError("report: perplexity must be finite and >= 1, got " +
                             std::to_string(report.perplexity));
    }
    report.per_layer_recon_error = layer_reconstruction_errors(dense, pruned, recon_inputs);
    report.realized_sparsity_per_layer = realized_sparsity(pruned);
    return report;
}

}  // namespace fedprune
