#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aeplab/report.hpp"

namespace {

using aeplab::RunConfig;

void add_model_option(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("-m,--model", cfg.model_path, "model definition file (JSON)")->required();
}

void add_output_options(CLI::App* cmd, RunConfig& cfg, std::string& format) {
    cmd->add_option("-o,--out", cfg.output_dir, "output directory for report files")
        ->capture_default_str();
    cmd->add_option("--format", format, "report files to write: json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}))
        ->capture_default_str();
    cmd->add_option("--max-dim", cfg.max_dim, "dense matrix capacity limit")
        ->capture_default_str();
}

void add_window_options(CLI::App* cmd, RunConfig& cfg, std::optional<double>& delta_prime) {
    cmd->add_option("--delta", cfg.delta, "window half-width delta")->capture_default_str();
    cmd->add_option("--delta-prime", delta_prime,
                    "selection half-width delta' (default delta/2)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aeplab - finite-size laboratory for the entropy equipartition of "
                 "ergodic quantum spin chains"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "both";
    std::optional<double> delta_prime;

    CLI::App* analyze =
        app.add_subcommand("analyze", "single-block spectra, beta and typical window");
    add_model_option(analyze, cfg);
    analyze->add_option("-n,--n", cfg.n, "block length")->capture_default_str();
    analyze->add_option("--eps", cfg.epsilons, "epsilon values for beta")
        ->capture_default_str();
    add_window_options(analyze, cfg, delta_prime);
    add_output_options(analyze, cfg, format);

    CLI::App* sweep = app.add_subcommand("sweep", "convergence table over n = 1..n_max");
    add_model_option(sweep, cfg);
    sweep->add_option("-n,--n-max", cfg.n_max, "largest block length")->capture_default_str();
    sweep->add_option("--eps", cfg.epsilons, "epsilon values for beta")->capture_default_str();
    sweep->add_option("--delta", cfg.delta, "window half-width delta")->capture_default_str();
    add_output_options(sweep, cfg, format);

    CLI::App* decompose =
        app.add_subcommand("decompose", "sublattice ergodic decomposition for l = 1..l_max");
    add_model_option(decompose, cfg);
    decompose->add_option("-l,--l-max", cfg.l_max, "largest sublattice spacing")
        ->capture_default_str();
    decompose->add_option("--eta", cfg.eta, "atypicality threshold on s_x - s")
        ->capture_default_str();
    add_output_options(decompose, cfg, format);

    CLI::App* compress =
        app.add_subcommand("compress", "typical-subspace codec and ensemble fidelity");
    add_model_option(compress, cfg);
    compress->add_option("-n,--n", cfg.n, "block length")->capture_default_str();
    add_window_options(compress, cfg, delta_prime);
    compress->add_option("--trials", cfg.trials, "Monte-Carlo trials")->capture_default_str();
    compress->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    add_output_options(compress, cfg, format);

    CLI::App* selftest =
        app.add_subcommand("selftest", "cross-check the library against built-in oracles");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems exit 1; --help exits 0
    }

    cfg.delta_prime = delta_prime;
    if (format == "json")
        cfg.format = RunConfig::Format::json;
    else if (format == "csv")
        cfg.format = RunConfig::Format::csv;
    else
        cfg.format = RunConfig::Format::both;

    if (analyze->parsed())
        cfg.command = RunConfig::Command::analyze;
    else if (sweep->parsed())
        cfg.command = RunConfig::Command::sweep;
    else if (decompose->parsed())
        cfg.command = RunConfig::Command::decompose;
    else if (compress->parsed())
        cfg.command = RunConfig::Command::compress;
    else
        cfg.command = RunConfig::Command::selftest;

    return aeplab::run_cli(cfg, std::cout, std::cerr);
}
