#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedprune/checks.hpp"
#include "fedprune/errors.hpp"
#include "fedprune/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitVerifyFailure = 1;
constexpr int kExitSpecError = 2;
constexpr int kExitNumericalError = 3;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fedprune::FormatError("cannot write " + path.string());
    out << content;
}

int check_out_dir(const std::string& out_dir) {
    if (!fs::is_directory(out_dir)) {
        std::cerr << "error: output directory does not exist: " << out_dir << '\n';
        return kExitSpecError;
    }
    return 0;
}

void write_artifacts(const fedprune::RunArtifacts& artifacts, const fs::path& out,
                     const std::string& stem) {
    write_file(out / (stem + ".csv"), artifacts.csv());
    write_file(out / (stem + ".json"), artifacts.archive.dump(2) + "\n");
    if (!artifacts.model_checkpoint.empty()) {
        write_file(out / "model.json", artifacts.model_checkpoint);
    }
    if (!artifacts.corpus_dump.empty()) {
        write_file(out / "corpus.json", artifacts.corpus_dump);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedprune — federated unstructured-pruning simulation engine"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir = ".";
    std::string axis;
    std::string filter;
    std::vector<std::uint32_t> values;

    CLI::App* cmd_run = app.add_subcommand("run", "execute every cell of an experiment grid");
    cmd_run->add_option("spec", spec_path, "experiment spec (.toml or .json)")->required();
    cmd_run->add_option("--out", out_dir, "output directory (must exist)");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "sensitivity sweep over one axis");
    cmd_sweep->add_option("--axis", axis, "clients | samples")
        ->required()
        ->check(CLI::IsMember({"clients", "samples"}));
    cmd_sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
    cmd_sweep->add_option("spec", spec_path, "base experiment spec")->required();
    cmd_sweep->add_option("--out", out_dir, "output directory (must exist)");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the acceptance check suite");
    cmd_verify->add_option("--filter", filter, "only run checks whose name contains this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitSpecError;
    }

    try {
        if (cmd_verify->parsed()) {
            const int failures = fedprune::run_acceptance_checks(filter, std::cout);
            if (failures > 0) {
                std::cout << failures << " check(s) failed\n";
                return kExitVerifyFailure;
            }
            std::cout << "all checks passed\n";
            return 0;
        }

        if (int rc = check_out_dir(out_dir); rc != 0) return rc;
        const fedprune::ExperimentSpec spec = fedprune::ExperimentSpec::from_file(spec_path);

        if (cmd_run->parsed()) {
            write_artifacts(fedprune::execute_run(spec), out_dir, "results");
        } else {
            const auto sweep_axis = fedprune::sweep_axis_from_name(axis);
            write_artifacts(fedprune::execute_sweep(spec, sweep_axis, values), out_dir,
                            "sweep_" + axis);
        }
        return 0;
    } catch (const fedprune::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSpecError;
    }
}
