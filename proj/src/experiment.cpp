#include "fedprune/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "fedprune/errors.hpp"
#include "fedprune/rng.hpp"
#include "fedprune/tomlish.hpp"

namespace fedprune {

namespace {

template <typename T, typename Fn>
std::vector<T> names_to_values(const nlohmann::json& arr, Fn&& convert) {
    std::vector<T> out;
    for (const auto& v : arr) out.push_back(convert(v.get<std::string>()));
    return out;
}

void read_if_present(const nlohmann::json& j, const char* key, std::uint32_t& into) {
    if (j.contains(key)) into = j.at(key).get<std::uint32_t>();
}

}  // namespace

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open spec file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("spec json: ") + e.what());
        }
    } else {
        j = parse_tomlish(text);
    }
    return from_json(j);
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    try {
        if (j.contains("corpus")) {
            const auto& c = j.at("corpus");
            read_if_present(c, "vocab", spec.corpus.vocab);
            read_if_present(c, "samples", spec.corpus.calibration_samples);
            read_if_present(c, "sample_len", spec.corpus.sample_len);
            read_if_present(c, "heldout", spec.corpus.heldout_samples);
            read_if_present(c, "training", spec.corpus.training_samples);
        }
        if (j.contains("model")) {
            const auto& m = j.at("model");
            read_if_present(m, "embed_dim", spec.model.embed_dim);
            if (m.contains("layers")) {
                spec.model.layer_out_dims = m.at("layers").get<std::vector<std::size_t>>();
            }
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            read_if_present(t, "epochs", spec.train.epochs);
            if (t.contains("learning_rate")) {
                spec.train.learning_rate = t.at("learning_rate").get<double>();
            }
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("sparsity")) {
                spec.grid.sparsity = g.at("sparsity").get<std::vector<double>>();
            }
            if (g.contains("metric")) {
                spec.grid.metric = names_to_values<Metric>(g.at("metric"), metric_from_name);
            }
            if (g.contains("local_group")) {
                spec.grid.local_group =
                    names_to_values<ComparisonGroup>(g.at("local_group"), group_from_name);
            }
            if (g.contains("server_group")) {
                spec.grid.server_group =
                    names_to_values<ComparisonGroup>(g.at("server_group"), group_from_name);
            }
            if (g.contains("strategy")) {
                spec.grid.strategy =
                    names_to_values<Strategy>(g.at("strategy"), strategy_from_name);
            }
            if (g.contains("scaling")) {
                spec.grid.scaling = g.at("scaling").get<std::vector<bool>>();
            }
            if (g.contains("clients")) {
                spec.grid.clients = g.at("clients").get<std::vector<std::uint32_t>>();
            }
        }
        if (j.contains("run")) {
            const auto& r = j.at("run");
            if (r.contains("seed")) spec.master_seed = r.at("seed").get<std::uint64_t>();
            if (r.contains("ria_alpha")) spec.ria_alpha = r.at("ria_alpha").get<double>();
            if (r.contains("sparsegpt_lambda_rule")) {
                spec.sparsegpt_lambda_rule = r.at("sparsegpt_lambda_rule").get<std::string>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

void ExperimentSpec::validate() const {
    if (corpus.vocab < 2) throw InputDomainError("spec: corpus.vocab must be >= 2");
    if (corpus.sample_len < 2) throw InputDomainError("spec: corpus.sample_len must be >= 2");
    if (corpus.calibration_samples == 0) throw InputDomainError("spec: corpus.samples must be > 0");
    if (corpus.heldout_samples == 0) throw InputDomainError("spec: corpus.heldout must be > 0");
    if (model.layer_out_dims.empty()) throw InputDomainError("spec: model.layers must be non-empty");
    if (model.embed_dim == 0) throw InputDomainError("spec: model.embed_dim must be > 0");
    if (grid.sparsity.empty() || grid.metric.empty() || grid.local_group.empty() ||
        grid.server_group.empty() || grid.strategy.empty() || grid.scaling.empty() ||
        grid.clients.empty()) {
        throw InputDomainError("spec: every grid axis needs at least one value");
    }
    for (double s : grid.sparsity) {
        if (s < 0.0 || s > 1.0) throw InputDomainError("spec: sparsity values must lie in [0,1]");
    }
    for (std::uint32_t m : grid.clients) {
        if (m == 0) throw InputDomainError("spec: client counts must be >= 1");
        if (m > corpus.calibration_samples) {
            throw InputDomainError("spec: " + std::to_string(m) + " clients exceed " +
                                   std::to_string(corpus.calibration_samples) +
                                   " calibration samples");
        }
    }
}

std::uint64_t cell_seed(std::uint64_t master,
                        const std::vector<std::pair<std::string, std::string>>& axes) {
    std::string canon;
    for (const auto& [k, v] : axes) {
        canon += k;
        canon += '=';
        canon += v;
        canon += ';';
    }
    return seed_for(master, canon);
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunContext {
    std::uint64_t master_seed = 0;
    Corpus corpus;
    PrunableModel dense;
    std::map<std::uint32_t, std::vector<TokenBatch>> shard_cache;

    const std::vector<TokenBatch>& shards_for(std::uint32_t m) {
        auto it = shard_cache.find(m);
        if (it == shard_cache.end()) {
            const std::uint64_t seed = seed_for(master_seed, "partition:" + std::to_string(m));
            it = shard_cache.emplace(m, partition(corpus.calibration, m, seed)).first;
        }
        return it->second;
    }
};

PruneConfig base_config(const ExperimentSpec& spec) {
    PruneConfig cfg;
    cfg.ria_alpha = spec.ria_alpha;
    cfg.sparsegpt_lambda_rule = spec.sparsegpt_lambda_rule;
    return cfg;
}

std::vector<std::pair<std::string, std::string>> axes_of(const std::string& method,
                                                         const PruneConfig& cfg,
                                                         std::uint32_t samples) {
    std::vector<std::pair<std::string, std::string>> axes;
    axes.emplace_back("method", method);
    axes.emplace_back("metric", std::string(metric_name(cfg.metric)));
    axes.emplace_back("sparsity", fmt_double(cfg.sparsity));
    axes.emplace_back("local_group", std::string(group_name(cfg.local_group)));
    if (method == "federated") {
        axes.emplace_back("server_group", std::string(group_name(cfg.server_group)));
        axes.emplace_back("strategy", std::string(strategy_name(cfg.strategy)));
        axes.emplace_back("scaling", cfg.scaling ? "true" : "false");
    }
    if (method != "centralized") {
        axes.emplace_back("clients", std::to_string(cfg.clients));
    }
    axes.emplace_back("samples", std::to_string(samples));
    return axes;
}

void fill_config_echo(PruneReport& report, const std::string& method, const PruneConfig& cfg,
                      std::uint32_t samples) {
    report.method = method;
    report.metric = std::string(metric_name(cfg.metric));
    report.local_group = std::string(group_name(cfg.local_group));
    if (method == "federated") {
        report.server_group = std::string(group_name(cfg.server_group));
        report.strategy = std::string(strategy_name(cfg.strategy));
        report.scaling = cfg.scaling;
    } else {
        report.server_group = "-";
        report.strategy = "-";
        report.scaling = false;
    }
    report.sparsity = cfg.sparsity;
    report.clients = method == "centralized" ? 1 : cfg.clients;
    report.samples = samples;
    report.seed = cfg.seed;
}

std::string cell_label(const std::vector<std::pair<std::string, std::string>>& axes) {
    std::string out;
    for (const auto& [k, v] : axes) {
        if (!out.empty()) out += ' ';
        out += k + '=' + v;
    }
    return out;
}

// Numerical failures get rethrown naming the cell that produced them.
template <typename Fn>
auto in_cell(const std::vector<std::pair<std::string, std::string>>& axes, Fn&& fn) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError("cell [" + cell_label(axes) + "]: " + e.what());
    }
}

PruneReport run_centralized_cell(RunContext& ctx, PruneConfig cfg, nlohmann::json& cells) {
    const auto samples = static_cast<std::uint32_t>(ctx.corpus.calibration.size());
    cfg.clients = 1;
    cfg.seed = cell_seed(ctx.master_seed, axes_of("centralized", cfg, samples));
    const auto t0 = std::chrono::steady_clock::now();
    PruneReport report = in_cell(axes_of("centralized", cfg, samples), [&] {
        CentralizedResult res = run_centralized(ctx.dense, ctx.corpus.calibration, cfg);
        return build_report(ctx.dense, res.model, ctx.corpus.calibration, ctx.corpus.heldout);
    });
    report.wall_time_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    fill_config_echo(report, "centralized", cfg, samples);
    nlohmann::json cell;
    cell["method"] = "centralized";
    cell["perplexity"] = report.perplexity;
    cell["per_layer_recon_error"] = report.per_layer_recon_error;
    cell["realized_sparsity"] = report.realized_sparsity_per_layer;
    cells.push_back(std::move(cell));
    return report;
}

PruneReport run_local_only_cell(RunContext& ctx, PruneConfig cfg, std::uint32_t m,
                                nlohmann::json& cells) {
    const auto samples = static_cast<std::uint32_t>(ctx.corpus.calibration.size());
    cfg.clients = m;
    cfg.seed = cell_seed(ctx.master_seed, axes_of("local_only", cfg, samples));
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ppls;
    std::vector<double> recon_sum(ctx.dense.layers.size(), 0.0);
    std::vector<CentralizedResult> res = in_cell(axes_of("local_only", cfg, samples), [&] {
        std::vector<ClientState> clients = make_clients(ctx.dense, ctx.shards_for(m));
        auto results = run_local_only(ctx.dense, clients, cfg);
        for (const CentralizedResult& r : results) {
            PruneReport one =
                build_report(ctx.dense, r.model, ctx.corpus.calibration, ctx.corpus.heldout);
            ppls.push_back(one.perplexity);
            for (std::size_t l = 0; l < recon_sum.size(); ++l) {
                recon_sum[l] += one.per_layer_recon_error[l];
            }
        }
        return results;
    });
    double mean = 0.0;
    for (double p : ppls) mean += p;
    mean /= static_cast<double>(ppls.size());
    double var = 0.0;
    for (double p : ppls) var += (p - mean) * (p - mean);
    var /= static_cast<double>(ppls.size());

    PruneReport report;
    report.perplexity = mean;
    report.perplexity_spread = std::sqrt(var);
    for (double& v : recon_sum) v /= static_cast<double>(res.size());
    report.per_layer_recon_error = recon_sum;
    report.realized_sparsity_per_layer = realized_sparsity(res.front().model);
    report.wall_time_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    fill_config_echo(report, "local_only", cfg, samples);

    nlohmann::json cell;
    cell["method"] = "local_only";
    cell["clients"] = m;
    cell["per_client_perplexity"] = ppls;
    cell["perplexity_mean"] = mean;
    cell["perplexity_stddev"] = report.perplexity_spread;
    cells.push_back(std::move(cell));
    return report;
}

PruneReport run_federated_cell(RunContext& ctx, PruneConfig cfg, nlohmann::json& cells) {
    const auto samples = static_cast<std::uint32_t>(ctx.corpus.calibration.size());
    cfg.seed = cell_seed(ctx.master_seed, axes_of("federated", cfg, samples));
    const auto t0 = std::chrono::steady_clock::now();
    const auto axes = axes_of("federated", cfg, samples);
    FederatedResult res = in_cell(axes, [&] {
        std::vector<ClientState> clients = make_clients(ctx.dense, ctx.shards_for(cfg.clients));
        return cfg.strategy == Strategy::OneShot ? run_oneshot(ctx.dense, clients, cfg)
                                                 : run_iterative(ctx.dense, clients, cfg);
    });
    PruneReport report = in_cell(axes, [&] {
        return build_report(ctx.dense, res.model, ctx.corpus.calibration, ctx.corpus.heldout);
    });
    report.comm = res.ledger;
    report.wall_time_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    fill_config_echo(report, "federated", cfg, samples);

    nlohmann::json cell;
    cell["method"] = "federated";
    cell["server_group"] = std::string(group_name(cfg.server_group));
    cell["strategy"] = std::string(strategy_name(cfg.strategy));
    cell["scaling"] = cfg.scaling;
    cell["clients"] = cfg.clients;
    cell["perplexity"] = report.perplexity;
    cell["per_layer_recon_error"] = report.per_layer_recon_error;
    cell["realized_sparsity"] = report.realized_sparsity_per_layer;
    cell["uplink_bits"] = res.ledger.uplink_bits;
    cell["downlink_bits"] = res.ledger.downlink_bits;
    cell["rounds"] = res.ledger.rounds;
    cells.push_back(std::move(cell));
    return report;
}

RunContext make_context(const ExperimentSpec& spec) {
    RunContext ctx;
    ctx.master_seed = spec.master_seed;
    ctx.corpus = generate_corpus(spec.corpus, seed_for(spec.master_seed, "corpus"));
    ctx.dense = train_reference_model(ctx.corpus, spec.model, spec.train,
                                      seed_for(spec.master_seed, "model"));
    return ctx;
}

}  // namespace

std::string RunArtifacts::csv() const {
    std::string out = PruneReport::csv_header() + '\n';
    for (const PruneReport& r : reports) out += r.csv_row() + '\n';
    return out;
}

RunArtifacts execute_run(const ExperimentSpec& spec) {
    spec.validate();
    RunContext ctx = make_context(spec);

    RunArtifacts artifacts;
    artifacts.archive["spec_seed"] = spec.master_seed;
    artifacts.archive["vocab"] = ctx.corpus.vocab;
    nlohmann::json cells = nlohmann::json::array();

    // Baselines depend only on (sparsity, metric, local_group) — plus the
    // client count for local-only — so they are emitted once per distinct
    // combination, before the federated cells that share it.
    std::set<std::string> centralized_done;
    std::set<std::string> local_only_done;
    for (double s : spec.grid.sparsity) {
        for (Metric metric : spec.grid.metric) {
            for (ComparisonGroup lg : spec.grid.local_group) {
                for (std::uint32_t m : spec.grid.clients) {
                    PruneConfig cfg = base_config(spec);
                    cfg.sparsity = s;
                    cfg.metric = metric;
                    cfg.local_group = lg;

                    const std::string base_key = fmt_double(s) + '|' +
                                                 std::string(metric_name(metric)) + '|' +
                                                 std::string(group_name(lg));
                    if (centralized_done.insert(base_key).second) {
                        artifacts.reports.push_back(run_centralized_cell(ctx, cfg, cells));
                    }
                    if (local_only_done.insert(base_key + '|' + std::to_string(m)).second) {
                        artifacts.reports.push_back(run_local_only_cell(ctx, cfg, m, cells));
                    }
                    for (ComparisonGroup sg : spec.grid.server_group) {
                        for (Strategy strat : spec.grid.strategy) {
                            for (bool scaling : spec.grid.scaling) {
                                PruneConfig fed = cfg;
                                fed.server_group = sg;
                                fed.strategy = strat;
                                fed.scaling = scaling;
                                fed.clients = m;
                                artifacts.reports.push_back(run_federated_cell(ctx, fed, cells));
                            }
                        }
                    }
                }
            }
        }
    }
    artifacts.archive["cells"] = std::move(cells);
    artifacts.model_checkpoint = model_to_json(ctx.dense, seed_for(spec.master_seed, "model"));
    artifacts.corpus_dump = corpus_to_json(ctx.corpus);
    return artifacts;
}

SweepAxis sweep_axis_from_name(std::string_view name) {
    if (name == "clients") return SweepAxis::Clients;
    if (name == "samples") return SweepAxis::Samples;
    throw InputDomainError("unknown sweep axis: " + std::string(name));
}

RunArtifacts execute_sweep(const ExperimentSpec& base, SweepAxis axis,
                           const std::vector<std::uint32_t>& values) {
    base.validate();
    RunArtifacts artifacts;
    artifacts.archive["sweep_axis"] = axis == SweepAxis::Clients ? "clients" : "samples";
    artifacts.archive["values"] = values;
    nlohmann::json cells = nlohmann::json::array();

    // Fixed configuration: first value of every grid axis.
    PruneConfig cfg = base_config(base);
    cfg.sparsity = base.grid.sparsity.front();
    cfg.metric = base.grid.metric.front();
    cfg.local_group = base.grid.local_group.front();
    cfg.server_group = base.grid.server_group.front();
    cfg.strategy = base.grid.strategy.front();
    cfg.scaling = base.grid.scaling.front();

    // The corpus and the trained model only depend on the sample count, so
    // a clients sweep shares one context across all values.
    std::unique_ptr<RunContext> shared_ctx;
    for (std::uint32_t value : values) {
        ExperimentSpec spec = base;
        std::uint32_t m = 0;
        if (axis == SweepAxis::Clients) {
            m = value;
        } else {
            spec.corpus.calibration_samples = value;
            m = value / 2;
        }
        if (m == 0 || m > spec.corpus.calibration_samples) {
            PruneReport skipped;
            PruneConfig echo = cfg;
            echo.clients = m;
            fill_config_echo(skipped, "skipped", echo, spec.corpus.calibration_samples);
            skipped.server_group = "-";
            skipped.strategy = "-";
            artifacts.reports.push_back(skipped);
            nlohmann::json cell;
            cell["method"] = "skipped";
            cell["value"] = value;
            cell["reason"] = "client count incompatible with sample count";
            cells.push_back(std::move(cell));
            continue;
        }
        spec.grid.clients = {m};
        spec.validate();
        RunContext local_ctx;
        RunContext* ctx = nullptr;
        if (axis == SweepAxis::Clients) {
            if (!shared_ctx) shared_ctx = std::make_unique<RunContext>(make_context(spec));
            ctx = shared_ctx.get();
        } else {
            local_ctx = make_context(spec);
            ctx = &local_ctx;
        }
        PruneConfig fed = cfg;
        fed.clients = m;
        artifacts.reports.push_back(run_centralized_cell(*ctx, cfg, cells));
        artifacts.reports.push_back(run_local_only_cell(*ctx, cfg, m, cells));
        artifacts.reports.push_back(run_federated_cell(*ctx, fed, cells));
    }
    artifacts.archive["cells"] = std::move(cells);
    return artifacts;
}

}  // namespace fedprune
