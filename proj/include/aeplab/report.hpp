#ifndef AEPLAB_REPORT_HPP
#define AEPLAB_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aeplab/source_model.hpp"

namespace aeplab {

// Shortest round-trip decimal representation (used for CSV cells and for the
// epsilon keys of JSON maps); infinities become "-inf"/"inf".
std::string format_double(double x);

// ---- report builders -------------------------------------------------------
// All builders return JSON with lexicographically ordered keys; serializing
// the same inputs twice yields byte-identical text.

struct AnalyzeOptions {
    std::size_t n = 8;
    std::vector<double> epsilons{0.1, 0.01};
    double delta = 0.1;
    std::optional<double> delta_prime;
    std::size_t max_dim = kDefaultMaxDim;
};

// Single-block deep dive: entropy, beta detail, level-set masses, projector.
nlohmann::json analyze_report(const SourceModel& model, const AnalyzeOptions& opt);

struct SweepOptions {
    std::size_t n_max = 12;
    std::vector<double> epsilons{0.1, 0.01};
    double delta = 0.1;
    std::size_t max_dim = kDefaultMaxDim;
};

// Convergence table over n = 1..n_max plus endpoint trends.
nlohmann::json sweep_report(const SourceModel& model, const SweepOptions& opt);

struct DecomposeOptions {
    std::size_t l_max = 16;
    double eta = 0.05;
};

// Sublattice decompositions for l = 1..l_max with entropy equality and
// atypicality per row.  The model is viewed as a classical chain (see
// as_classical in ergodic.hpp).
nlohmann::json decompose_report(const SourceModel& model, const DecomposeOptions& opt);

struct CompressOptions {
    std::size_t n = 8;
    double delta = 0.1;
    std::optional<double> delta_prime;
    std::size_t trials = 2000;
    std::uint64_t seed = 0;
    std::size_t max_dim = kDefaultMaxDim;
};

// Codec construction plus Monte-Carlo ensemble fidelity.
nlohmann::json compress_report(const SourceModel& model, const CompressOptions& opt);

// Selftest outcomes as JSON (suites with pass flags and details).
nlohmann::json selftest_report();

// ---- CSV projections -------------------------------------------------------
// Flat views of the corresponding JSON reports, one line per row.

std::string analyze_csv(const nlohmann::json& report);
std::string sweep_csv(const nlohmann::json& report);
std::string decompose_csv(const nlohmann::json& report);
std::string compress_csv(const nlohmann::json& report);

// ---- CLI driver ------------------------------------------------------------

struct RunConfig {
    enum class Command { analyze, sweep, decompose, compress, selftest };
    enum class Format { json, csv, both };

    Command command = Command::analyze;
    std::string model_path;
    std::string output_dir = ".";
    Format format = Format::both;

    std::size_t n = 8;        // analyze / compress
    std::size_t n_max = 12;   // sweep
    std::size_t l_max = 16;   // decompose
    std::vector<double> epsilons{0.1, 0.01};
    double delta = 0.1;
    std::optional<double> delta_prime;
    double eta = 0.05;
    std::size_t trials = 2000;
    std::uint64_t seed = 0;
    std::size_t max_dim = kDefaultMaxDim;
};

// Executes one command: writes report files into output_dir and a short
// summary to `out`.  Returns the process exit code:
//   0 success, 1 usage/parameter/contract problems, 2 capacity/numerical
//   failures, 3 selftest failure.
int run_cli(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace aeplab

#endif
