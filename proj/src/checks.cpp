#include "fedprune/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "fedprune/evaluation.hpp"
#include "fedprune/experiment.hpp"
#include "fedprune/rng.hpp"

namespace fedprune {

namespace {

// ---------------------------------------------------------------------------
// brute-force oracles (full sort; the engine itself selects via nth_element)

MaskMatrix oracle_lowest_mask(const Matrix& scores, double sparsity, ComparisonGroup group) {
    MaskMatrix mask(scores.rows(), scores.cols());
    auto mark_group = [&](std::vector<std::size_t> idx) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double va = scores.values()[a], vb = scores.values()[b];
            if (va != vb) return va < vb;
            return a < b;
        });
        const auto k = static_cast<std::size_t>(
            std::floor(sparsity * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < std::min(k, idx.size()); ++i) mask.bits[idx[i]] = 1;
    };
    const std::size_t rows = scores.rows(), cols = scores.cols();
    if (group == ComparisonGroup::Layer) {
        std::vector<std::size_t> idx(rows * cols);
        std::iota(idx.begin(), idx.end(), 0);
        mark_group(std::move(idx));
    } else if (group == ComparisonGroup::Row) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::size_t> idx(cols);
            std::iota(idx.begin(), idx.end(), r * cols);
            mark_group(std::move(idx));
        }
    } else {
        for (std::size_t c = 0; c < cols; ++c) {
            std::vector<std::size_t> idx(rows);
            for (std::size_t r = 0; r < rows; ++r) idx[r] = r * cols + c;
            mark_group(std::move(idx));
        }
    }
    return mask;
}

MaskMatrix oracle_highest_votes_mask(const AggregatedMask& agg, double sparsity,
                                     ComparisonGroup group) {
    // Reuse the lowest-score oracle on negated votes; the (value, index)
    // tie-break order is preserved.
    Matrix neg(agg.rows, agg.cols);
    for (std::size_t i = 0; i < agg.votes.size(); ++i) {
        neg.data()[i] = -static_cast<double>(agg.votes[i]);
    }
    return oracle_lowest_mask(neg, sparsity, group);
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.gaussian();
    return m;
}

bool matrices_bit_identical(const Matrix& a, const Matrix& b) {
    return a.same_shape(b) && a.values() == b.values();
}

bool models_bit_identical(const PrunableModel& a, const PrunableModel& b) {
    if (!matrices_bit_identical(a.embedding, b.embedding)) return false;
    if (!matrices_bit_identical(a.head, b.head)) return false;
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (!matrices_bit_identical(a.layers[l].weights, b.layers[l].weights)) return false;
    }
    return true;
}

constexpr ComparisonGroup kGroups[] = {ComparisonGroup::Layer, ComparisonGroup::Row,
                                       ComparisonGroup::Column};
constexpr double kSparsities[] = {0.25, 0.5, 0.75};

// popcounts per group instance of `is_zero` positions must equal
// floor(s * group_size)
bool sparsity_exact_per_group(const Matrix& w, double s, ComparisonGroup g) {
    const std::size_t rows = w.rows(), cols = w.cols();
    auto expected = [&](std::size_t size) {
        return static_cast<std::size_t>(std::floor(s * static_cast<double>(size)));
    };
    if (g == ComparisonGroup::Layer) {
        std::size_t zeros = 0;
        for (double v : w.values()) zeros += v == 0.0;
        return zeros == expected(rows * cols);
    }
    if (g == ComparisonGroup::Row) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t zeros = 0;
            for (std::size_t c = 0; c < cols; ++c) zeros += w(r, c) == 0.0;
            if (zeros != expected(cols)) return false;
        }
        return true;
    }
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t zeros = 0;
        for (std::size_t r = 0; r < rows; ++r) zeros += w(r, c) == 0.0;
        if (zeros != expected(rows)) return false;
    }
    return true;
}

// Small federated fixture shared by several checks.
struct Fixture {
    Corpus corpus;
    PrunableModel dense;
    std::vector<TokenBatch> shards;
};

Fixture make_fixture(std::uint32_t vocab, std::uint32_t samples, std::uint32_t sample_len,
                     std::uint32_t clients, std::uint32_t embed_dim,
                     std::vector<std::size_t> layer_dims, std::uint64_t seed) {
    Fixture f;
    CorpusParams cp;
    cp.vocab = vocab;
    cp.calibration_samples = samples;
    cp.sample_len = sample_len;
    cp.heldout_samples = std::max<std::uint32_t>(4, samples / 4);
    cp.training_samples = samples;
    f.corpus = generate_corpus(cp, seed);
    f.dense = make_seeded_model(vocab, embed_dim, layer_dims, mix_seed(seed, 77));
    f.shards = partition(f.corpus.calibration, clients, mix_seed(seed, 88));
    return f;
}

PruneConfig wanda_config(double s, ComparisonGroup lg, ComparisonGroup sg, Strategy strat,
                         bool scaling, std::uint32_t m) {
    PruneConfig cfg;
    cfg.sparsity = s;
    cfg.metric = Metric::Wanda;
    cfg.local_group = lg;
    cfg.server_group = sg;
    cfg.strategy = strat;
    cfg.scaling = scaling;
    cfg.clients = m;
    return cfg;
}

// ---------------------------------------------------------------------------
// criterion 1

CheckResult check_oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240521);
    const std::uint32_t ms[] = {1, 2, 3, 5};
    std::size_t cases = 0, selections = 0;
    for (int case_idx = 0; case_idx < 200; ++case_idx) {
        const std::size_t rows = 1 + rng.below(16);
        const std::size_t cols = 1 + rng.below(16);
        const std::uint32_t m = ms[case_idx % 4];
        std::vector<Matrix> client_scores;
        for (std::uint32_t i = 0; i < m; ++i) {
            client_scores.push_back(random_matrix(rng, rows, cols));
        }
        ++cases;
        for (double s : kSparsities) {
            for (ComparisonGroup lg : kGroups) {
                std::vector<MaskMatrix> client_masks;
                for (const Matrix& scores : client_scores) {
                    MaskMatrix engine = mask_from_scores(scores, s, lg);
                    if (!(engine == oracle_lowest_mask(scores, s, lg))) {
                        return {false, "client mask mismatch at case " + std::to_string(case_idx)};
                    }
                    client_masks.push_back(std::move(engine));
                    ++selections;
                }
                const AggregatedMask agg = aggregate_masks(client_masks);
                for (ComparisonGroup sg : kGroups) {
                    const MaskMatrix engine = select_final_mask(agg, s, sg);
                    if (!(engine == oracle_highest_votes_mask(agg, s, sg))) {
                        return {false, "final mask mismatch at case " + std::to_string(case_idx)};
                    }
                    ++selections;
                }
            }
        }
    }
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (secs >= 30.0) {
        return {false, "oracle sweep took " + std::to_string(secs) + "s (budget 30s)"};
    }
    std::ostringstream os;
    os << cases << " cases, " << selections << " selections match the full-sort oracle ("
       << secs << "s)";
    return {true, os.str()};
}

// criterion 2

CheckResult check_sparsity_exactness() {
    Fixture f = make_fixture(16, 24, 16, 3, 8, {12, 10, 7}, 42);
    const double sparsities[] = {0.25, 0.33, 0.5, 0.75};
    for (double s : sparsities) {
        for (ComparisonGroup lg : kGroups) {
            for (ComparisonGroup sg : kGroups) {
                for (Strategy strat : {Strategy::OneShot, Strategy::Iterative}) {
                    auto clients = make_clients(f.dense, f.shards);
                    const PruneConfig cfg = wanda_config(s, lg, sg, strat, false, 3);
                    const FederatedResult res = strat == Strategy::OneShot
                                                    ? run_oneshot(f.dense, clients, cfg)
                                                    : run_iterative(f.dense, clients, cfg);
                    for (std::size_t l = 0; l < res.model.layers.size(); ++l) {
                        const Matrix& w = res.model.layers[l].weights;
                        if (!sparsity_exact_per_group(w, s, sg)) {
                            std::ostringstream os;
                            os << "layer " << l << " violates floor(s*group_size) at s=" << s
                               << " sg=" << group_name(sg) << " strat=" << strategy_name(strat);
                            return {false, os.str()};
                        }
                        const std::size_t expect =
                            res.final_masks[l].popcount();
                        std::size_t zeros = 0;
                        for (double v : w.values()) zeros += v == 0.0;
                        if (zeros != expect) {
                            return {false, "weight zeros disagree with final mask popcount"};
                        }
                    }
                }
            }
        }
    }
    return {true, "per-group zero counts equal floor(s*group_size) for all groups/strategies"};
}

// criterion 3

CheckResult check_degenerate_client_equivalence() {
    Fixture f = make_fixture(16, 12, 16, 1, 8, {12, 10}, 7);
    for (ComparisonGroup g : kGroups) {
        for (Strategy strat : {Strategy::OneShot, Strategy::Iterative}) {
            auto clients = make_clients(f.dense, f.shards);
            const PruneConfig cfg = wanda_config(0.5, g, g, strat, false, 1);
            const FederatedResult fed = strat == Strategy::OneShot
                                            ? run_oneshot(f.dense, clients, cfg)
                                            : run_iterative(f.dense, clients, cfg);
            const CentralizedResult central = run_centralized(f.dense, f.shards[0], cfg);
            if (!models_bit_identical(fed.model, central.model)) {
                std::ostringstream os;
                os << "m=1 federated differs from centralized for group " << group_name(g)
                   << " strategy " << strategy_name(strat);
                return {false, os.str()};
            }
        }
    }
    return {true, "m=1 federated output bit-identical to centralized for all groups/strategies"};
}

// criterion 4

CheckResult check_fedavg_scaling_identity() {
    Fixture f = make_fixture(16, 16, 16, 4, 8, {12, 10}, 11);
    auto clients = make_clients(f.dense, f.shards);
    const PruneConfig cfg = wanda_config(0.5, ComparisonGroup::Row, ComparisonGroup::Layer,
                                         Strategy::OneShot, true, 4);
    const FederatedResult res = run_oneshot(f.dense, clients, cfg);
    // run_oneshot leaves each client's copy locally pruned; the FedAvg view
    // is their mean, masked by the final mask.
    double worst = 0.0;
    for (std::size_t l = 0; l < f.dense.layers.size(); ++l) {
        const Matrix& global_w = res.model.layers[l].weights;
        Matrix fedavg(global_w.rows(), global_w.cols());
        for (const ClientState& c : clients) {
            const Matrix& w = c.model_copy.layers[l].weights;
            for (std::size_t i = 0; i < w.size(); ++i) fedavg.data()[i] += w.values()[i];
        }
        for (std::size_t i = 0; i < fedavg.size(); ++i) {
            fedavg.data()[i] /= static_cast<double>(clients.size());
            if (res.final_masks[l].bits[i]) fedavg.data()[i] = 0.0;
            const double a = fedavg.values()[i], b = global_w.values()[i];
            const double rel = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
            worst = std::max(worst, rel);
        }
    }
    if (worst > 1e-12) {
        return {false, "FedAvg identity violated: relative deviation " + std::to_string(worst)};
    }
    return {true, "scaled one-shot equals masked FedAvg mean (max rel dev " +
                      std::to_string(worst) + ")"};
}

// criterion 5

CheckResult check_wanda_column_degeneration() {
    Rng rng(59);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t rows = 2 + rng.below(14);
        const std::size_t cols = 2 + rng.below(14);
        const Matrix w = random_matrix(rng, rows, cols);
        const Matrix acts = random_matrix(rng, 3 + rng.below(10), cols);
        const FeatureNorms norms = feature_norms(acts);
        for (double n : norms.norms) {
            if (!(n > 0.0)) return {false, "fixture produced a zero feature norm"};
        }
        for (double s : kSparsities) {
            const MaskMatrix wanda =
                mask_from_scores(score_wanda(w, norms).values, s, ComparisonGroup::Column);
            const MaskMatrix magnitude =
                mask_from_scores(score_magnitude(w).values, s, ComparisonGroup::Column);
            if (!(wanda == magnitude)) {
                return {false, "column-group Wanda mask differs from magnitude mask at rep " +
                                   std::to_string(rep)};
            }
        }
    }
    return {true, "column-group Wanda masks equal magnitude masks (positive norms)"};
}

// criterion 6

CheckResult check_oneshot_iterative_coincidence() {
    // (a) single layer: no propagation can diverge
    {
        Fixture f = make_fixture(16, 12, 16, 3, 8, {10}, 13);
        const PruneConfig cfg = wanda_config(0.5, ComparisonGroup::Row, ComparisonGroup::Layer,
                                             Strategy::OneShot, false, 3);
        auto c1 = make_clients(f.dense, f.shards);
        auto c2 = make_clients(f.dense, f.shards);
        PruneConfig iter_cfg = cfg;
        iter_cfg.strategy = Strategy::Iterative;
        const FederatedResult a = run_oneshot(f.dense, c1, cfg);
        const FederatedResult b = run_iterative(f.dense, c2, iter_cfg);
        if (!(a.final_masks == b.final_masks) || !models_bit_identical(a.model, b.model)) {
            return {false, "L=1 one-shot and iterative masks differ"};
        }
    }
    // (b) identical shards: unanimity removes all divergence
    {
        Fixture f = make_fixture(16, 12, 16, 3, 8, {12, 10, 7}, 17);
        const std::vector<TokenBatch> same_shards(3, f.corpus.calibration);
        const PruneConfig cfg = wanda_config(0.5, ComparisonGroup::Row, ComparisonGroup::Layer,
                                             Strategy::OneShot, false, 3);
        auto c1 = make_clients(f.dense, same_shards);
        auto c2 = make_clients(f.dense, same_shards);
        PruneConfig iter_cfg = cfg;
        iter_cfg.strategy = Strategy::Iterative;
        const FederatedResult a = run_oneshot(f.dense, c1, cfg);
        const FederatedResult b = run_iterative(f.dense, c2, iter_cfg);
        const CentralizedResult central = run_centralized(f.dense, f.corpus.calibration, cfg);
        if (!(a.final_masks == b.final_masks)) {
            return {false, "identical shards: one-shot and iterative masks differ"};
        }
        if (!(a.final_masks == central.masks)) {
            return {false, "identical shards: federated masks differ from centralized"};
        }
    }
    return {true, "masks coincide for L=1 and for identical shards (incl. centralized)"};
}

// criterion 7

CheckResult check_communication_accounting() {
    struct Case {
        std::uint32_t m;
        std::vector<std::size_t> layer_dims;
        std::uint32_t embed;
    };
    const Case cases[] = {{3, {4, 4}, 4}, {1, {6}, 5}, {5, {8, 3, 7}, 6}, {4, {4, 4}, 4}};
    for (const Case& c : cases) {
        Fixture f = make_fixture(8, static_cast<std::uint32_t>(2 * c.m), 8, c.m, c.embed,
                                 c.layer_dims, 23 + c.m);
        std::uint64_t mask_bits = 0;
        std::size_t d_in = c.embed;
        for (std::size_t d_out : c.layer_dims) {
            mask_bits += static_cast<std::uint64_t>(d_out) * d_in;
            d_in = d_out;
        }
        for (bool scaling : {false, true}) {
            for (Strategy strat : {Strategy::OneShot, Strategy::Iterative}) {
                auto clients = make_clients(f.dense, f.shards);
                const PruneConfig cfg = wanda_config(0.5, ComparisonGroup::Row,
                                                     ComparisonGroup::Layer, strat, scaling, c.m);
                const FederatedResult res = strat == Strategy::OneShot
                                                ? run_oneshot(f.dense, clients, cfg)
                                                : run_iterative(f.dense, clients, cfg);
                const std::uint64_t uplink = c.m * mask_bits;
                std::uint64_t downlink = 0;
                std::uint64_t rounds = 1;
                if (strat == Strategy::Iterative) {
                    rounds = c.layer_dims.size();
                    downlink = c.m * mask_bits;
                    if (scaling) downlink += c.m * mask_bits * vote_bit_width(c.m);
                }
                if (res.ledger.uplink_bits != uplink || res.ledger.downlink_bits != downlink ||
                    res.ledger.rounds != rounds) {
                    std::ostringstream os;
                    os << "ledger mismatch (m=" << c.m << " strat=" << strategy_name(strat)
                       << " scaling=" << scaling << "): got up=" << res.ledger.uplink_bits
                       << " down=" << res.ledger.downlink_bits << " rounds=" << res.ledger.rounds
                       << ", want up=" << uplink << " down=" << downlink << " rounds=" << rounds;
                    return {false, os.str()};
                }
            }
        }
    }
    return {true, "ledgers equal closed forms across m, dims, strategies, scaling"};
}

// criterion 8

CheckResult check_directional_takeaways() {
    const auto t0 = std::chrono::steady_clock::now();
    const int num_seeds = 9;
    int win_a = 0, win_b = 0, win_c = 0, win_d = 0;
    for (int i = 0; i < num_seeds; ++i) {
        const std::uint64_t seed = 1000 + i;
        CorpusParams cp;
        cp.vocab = 32;
        cp.calibration_samples = 128;
        cp.sample_len = 64;
        cp.heldout_samples = 32;
        cp.training_samples = 128;
        const Corpus corpus = generate_corpus(cp, seed);
        ModelDims dims;
        dims.embed_dim = 64;
        dims.layer_out_dims = {64, 64};
        const PrunableModel dense =
            train_reference_model(corpus, dims, TrainParams{}, mix_seed(seed, 5));
        const auto shards = partition(corpus.calibration, 16, mix_seed(seed, 6));

        auto fed = [&](ComparisonGroup sg, Strategy strat, bool scaling) {
            auto clients = make_clients(dense, shards);
            const PruneConfig cfg =
                wanda_config(0.5, ComparisonGroup::Row, sg, strat, scaling, 16);
            return strat == Strategy::OneShot ? run_oneshot(dense, clients, cfg)
                                              : run_iterative(dense, clients, cfg);
        };
        const PruneConfig base =
            wanda_config(0.5, ComparisonGroup::Row, ComparisonGroup::Layer, Strategy::OneShot,
                         false, 16);

        const double ppl_central =
            perplexity(run_centralized(dense, corpus.calibration, base).model, corpus.heldout);
        double ppl_local_mean = 0.0;
        {
            auto clients = make_clients(dense, shards);
            PruneConfig cfg = base;
            cfg.clients = 16;
            for (const CentralizedResult& r : run_local_only(dense, clients, cfg)) {
                ppl_local_mean += perplexity(r.model, corpus.heldout);
            }
            ppl_local_mean /= 16.0;
        }
        const FederatedResult f_layer = fed(ComparisonGroup::Layer, Strategy::OneShot, false);
        const FederatedResult f_scaled = fed(ComparisonGroup::Layer, Strategy::OneShot, true);
        const FederatedResult f_iter = fed(ComparisonGroup::Layer, Strategy::Iterative, false);
        const FederatedResult f_column = fed(ComparisonGroup::Column, Strategy::OneShot, false);

        const double ppl_fed = perplexity(f_layer.model, corpus.heldout);
        const double ppl_scaled = perplexity(f_scaled.model, corpus.heldout);
        const double ppl_iter = perplexity(f_iter.model, corpus.heldout);

        auto mean_recon = [&](const FederatedResult& r) {
            const auto errs = layer_reconstruction_errors(dense, r.model, corpus.calibration);
            double sum = 0.0;
            for (double e : errs) sum += e;
            return sum / static_cast<double>(errs.size());
        };

        if (ppl_central <= ppl_fed && ppl_fed <= ppl_local_mean) ++win_a;
        if (ppl_fed <= ppl_scaled) ++win_b;
        if (std::abs(ppl_fed - ppl_iter) <= 0.05 * ppl_fed) ++win_c;
        if (mean_recon(f_column) > mean_recon(f_layer)) ++win_d;
    }
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    std::ostringstream os;
    os << "seed wins: central<=fed<=local " << win_a << "/9, no-scaling<=scaling " << win_b
       << "/9, |oneshot-iter|<=5% " << win_c << "/9, column recon > layer recon " << win_d
       << "/9 (" << secs << "s)";
    const bool pass = win_a >= 6 && win_b >= 6 && win_c >= 6 && win_d >= 6 && secs < 300.0;
    return {pass, os.str()};
}

// criterion 9

CheckResult check_determinism() {
    ExperimentSpec spec;
    spec.corpus = {16, 16, 16, 4, 16};
    spec.model.embed_dim = 12;
    spec.model.layer_out_dims = {16, 12};
    spec.train = {8, 0.5};
    spec.grid.sparsity = {0.5};
    spec.grid.metric = {Metric::Wanda};
    spec.grid.local_group = {ComparisonGroup::Row};
    spec.grid.server_group = {ComparisonGroup::Layer, ComparisonGroup::Row};
    spec.grid.strategy = {Strategy::OneShot, Strategy::Iterative};
    spec.grid.scaling = {false, true};
    spec.grid.clients = {4};
    spec.master_seed = 99;

    auto run_with_threads = [&](const char* threads) {
        setenv("FEDPRUNE_THREADS", threads, 1);
        RunArtifacts artifacts = execute_run(spec);
        unsetenv("FEDPRUNE_THREADS");
        // drop the wall_time column (always last)
        std::string csv = artifacts.csv();
        std::string stripped;
        std::istringstream lines(csv);
        std::string line;
        while (std::getline(lines, line)) {
            stripped += line.substr(0, line.rfind(','));
            stripped += '\n';
        }
        return std::pair{stripped, artifacts.model_checkpoint};
    };

    const auto [csv1, model1] = run_with_threads("1");
    const auto [csv4, model4] = run_with_threads("4");
    const auto [csv1b, model1b] = run_with_threads("1");
    if (csv1 != csv4) return {false, "CSV differs between 1-thread and 4-thread runs"};
    if (csv1 != csv1b) return {false, "CSV differs between repeated identical runs"};
    if (model1 != model4 || model1 != model1b) {
        return {false, "model checkpoint differs between runs"};
    }
    return {true, "bit-identical CSV (sans wall_time) and checkpoints across reruns and thread counts"};
}

// criterion 10

CheckResult check_wire_roundtrip() {
    Rng rng(77);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t rows = 1 + rng.below(40);
        const std::size_t cols = 1 + rng.below(40);
        MaskMatrix mask(rows, cols);
        for (auto& b : mask.bits) b = rng.uniform() < 0.4 ? 1 : 0;
        const auto layer = static_cast<std::uint32_t>(rng.below(64));
        const auto client = static_cast<std::uint32_t>(rng.below(64));
        const auto frame = encode_mask_frame(layer, client, mask);
        const std::size_t expect_size = kMaskFrameHeaderBytes + (rows * cols + 7) / 8;
        if (frame.size() != expect_size) {
            return {false, "frame size " + std::to_string(frame.size()) + " != " +
                               std::to_string(expect_size)};
        }
        const MaskFrame decoded = decode_mask_frame(frame);
        if (decoded.layer_index != layer || decoded.client_id != client ||
            !(decoded.mask == mask)) {
            return {false, "frame round-trip mismatch at rep " + std::to_string(rep)};
        }
    }
    return {true, "1000 random masks round-trip; frame sizes match ceil(rc/8)+16"};
}

}  // namespace

const std::vector<Check>& acceptance_checks() {
    static const std::vector<Check> checks = {
        {"oracle_equivalence", check_oracle_equivalence},
        {"sparsity_exactness", check_sparsity_exactness},
        {"degenerate_client_equivalence", check_degenerate_client_equivalence},
        {"fedavg_scaling_identity", check_fedavg_scaling_identity},
        {"wanda_column_degeneration", check_wanda_column_degeneration},
        {"oneshot_iterative_coincidence", check_oneshot_iterative_coincidence},
        {"communication_accounting", check_communication_accounting},
        {"directional_takeaways", check_directional_takeaways},
        {"determinism", check_determinism},
        {"wire_roundtrip", check_wire_roundtrip},
    };
    return checks;
}

int run_acceptance_checks(std::string_view filter, std::ostream& out) {
    int failures = 0;
    for (const Check& check : acceptance_checks()) {
        if (!filter.empty() && check.name.find(filter) == std::string::npos) continue;
        CheckResult result;
        try {
            result = check.fn();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        out << (result.pass ? "[PASS] " : "[FAIL] ") << check.name << ": " << result.detail
            << '\n';
        if (!result.pass) ++failures;
    }
    return failures;
}

}  // namespace fedprune
