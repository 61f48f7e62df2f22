#include "aeplab/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "aeplab/aep.hpp"
#include "aeplab/codec.hpp"
#include "aeplab/ergodic.hpp"
#include "aeplab/errors.hpp"
#include "aeplab/selftest.hpp"

namespace aeplab {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// ==== report builders =======================================================

namespace {

void check_epsilons(const std::vector<double>& epsilons) {
    if (epsilons.empty()) throw ParameterError("at least one epsilon is required");
}

json verdicts_json(const TypicalProjector& tp) {
    return json{{"mass_ok", tp.mass_ok}, {"window_ok", tp.window_ok}, {"dim_ok", tp.dim_ok}};
}

json typical_json(const TypicalProjector& tp) {
    return json{{"mass", tp.mass},
                {"log_dim", tp.log_dim},
                {"count", tp.selection.size()},
                {"verdicts", verdicts_json(tp)}};
}

}  // namespace

json analyze_report(const SourceModel& model, const AnalyzeOptions& opt) {
    check_epsilons(opt.epsilons);
    const double s = mean_entropy(model);
    const BlockState block = block_density(model, opt.n, opt.max_dim);
    const TypicalProjector tp = typical_projector(block, s, opt.delta, opt.delta_prime);
    const EmpiricalDistribution dist = spectrum_distribution(block);
    const LevelMasses levels = partition_levels(dist, opt.n, s, opt.delta);
    const double entropy = block_entropy(model, opt.n, opt.max_dim);
    const double nd = static_cast<double>(opt.n);

    json betas = json::object();
    json beta_detail = json::object();
    json alphas = json::object();
    for (double eps : opt.epsilons) {
        const BetaResult b = beta(block, eps);
        const std::string key = format_double(eps);
        betas[key] = b.rate;
        beta_detail[key] = json{{"count", b.count}, {"beta", b.beta}, {"rate", b.rate}};
        alphas[key] = alpha(dist, eps) / nd;
    }

    json row{{"n", opt.n},
             {"entropy", entropy},
             {"entropy_rate", entropy / nd},
             {"betas", betas},
             {"beta_detail", beta_detail},
             {"alphas", alphas},
             {"levels",
              json{{"upper", levels.upper}, {"window", levels.window}, {"lower", levels.lower}}},
             {"typical", typical_json(tp)}};

    return json{{"command", "analyze"}, {"model_hash", block.source_hash},
                {"s", s},               {"delta", opt.delta},
                {"delta_prime", tp.delta_prime}, {"rows", json::array({row})}};
}

json sweep_report(const SourceModel& model, const SweepOptions& opt) {
    check_epsilons(opt.epsilons);
    const AepReport rep =
        aep_convergence_report(model, opt.n_max, opt.epsilons, opt.delta, opt.max_dim);

    json rows = json::array();
    for (const AepRow& r : rep.rows) {
        json betas = json::object();
        for (const auto& [eps, b] : r.betas) betas[format_double(eps)] = b.rate;
        rows.push_back(json{{"n", r.n},
                            {"entropy_rate", r.entropy_rate},
                            {"betas", betas},
                            {"typical",
                             json{{"mass", r.typical_mass},
                                  {"log_dim", r.typical_log_dim},
                                  {"verdicts",
                                   json{{"mass_ok", r.mass_ok},
                                        {"window_ok", r.window_ok},
                                        {"dim_ok", r.dim_ok}}}}}});
    }
    json trends = json::array();
    for (const BetaTrend& t : rep.trends)
        trends.push_back(json{{"epsilon", format_double(t.epsilon)},
                              {"n_first", t.n_first},
                              {"n_last", t.n_last},
                              {"deviation_first", t.deviation_first},
                              {"deviation_last", t.deviation_last},
                              {"deviation_shrinks", t.deviation_shrinks}});

    return json{{"command", "sweep"}, {"model_hash", rep.model_hash},
                {"s", rep.s},         {"delta", rep.delta},
                {"delta_prime", rep.delta / 2.0},
                {"rows", rows},       {"trends", trends}};
}

json decompose_report(const SourceModel& model, const DecomposeOptions& opt) {
    const ClassicalMarkov chain = as_classical(model);
    const double s = mean_entropy(SourceModel{chain});
    const std::vector<AtypicalRow> atypical = atypical_density(chain, opt.l_max, opt.eta);

    json rows = json::array();
    for (std::size_t l = 1; l <= opt.l_max; ++l) {
        const ComponentEntropyReport cer = component_entropy_check(chain, l);
        const AtypicalRow& at = atypical[l - 1];
        json components = json::array();
        for (std::size_t x = 0; x < cer.k; ++x)
            components.push_back(json{{"index", x},
                                      {"entropy_rate_Gl", cer.rates[x]},
                                      {"s_finite_box", at.finite_box_entropies[x]}});
        rows.push_back(json{{"l", l},
                            {"k", cer.k},
                            {"divides_l", l % cer.k == 0},
                            {"components", components},
                            {"equal_entropy", cer.equal},
                            {"atypical_count", at.atypical_count},
                            {"atypical_fraction", at.fraction}});
    }

    return json{{"command", "decompose"},
                {"model_hash", model_hash(model)},
                {"classical_basis", classical_basis(model)},
                {"s", s},
                {"eta", opt.eta},
                {"period", chain_period(chain)},
                {"rows", rows}};
}

json compress_report(const SourceModel& model, const CompressOptions& opt) {
    const CodecConfig codec = build_codec(model, opt.n, opt.delta, opt.delta_prime, opt.max_dim);
    const FidelityReport fr = ensemble_fidelity(codec, opt.trials, opt.seed);
    return json{{"command", "compress"},
                {"model_hash", codec.source_hash},
                {"n", opt.n},
                {"delta", codec.delta},
                {"delta_prime", codec.delta_prime},
                {"s", codec.s},
                {"block_dim", codec.block_dim},
                {"code_dim", codec.code_dim},
                {"qubit_count", codec.qubit_count},
                {"rate_qubits_per_site", codec.qubit_rate},
                {"typical_mass", codec.typical_mass},
                {"trials", fr.trials},
                {"seed", fr.seed},
                {"mean_fidelity", fr.mean_fidelity},
                {"stderr", fr.stderr_fidelity},
                {"zero_mass_events", fr.zero_mass_events}};
}

json selftest_report() {
    json suites = json::array();
    bool all = true;
    for (const SelftestResult& r : run_selftests()) {
        suites.push_back(json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        all = all && r.passed;
    }
    return json{{"command", "selftest"}, {"suites", suites}, {"all_passed", all}};
}

// ==== CSV projections =======================================================

namespace {

std::string csv_cell(const json& v) {
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_null()) return "-inf";  // empty-window log_dim
    return v.get<std::string>();
}

std::vector<std::string> beta_keys(const json& report) {
    std::vector<std::string> keys;
    for (const auto& item : report.at("rows").at(0).at("betas").items())
        keys.push_back(item.key());
    return keys;  // object iteration is already lexicographic
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

}  // namespace

std::string analyze_csv(const json& report) {
    const std::vector<std::string> eps = beta_keys(report);
    std::vector<std::string> header{"n", "entropy", "entropy_rate"};
    for (const std::string& e : eps) header.push_back("beta_rate_" + e);
    for (const std::string& e : eps) header.push_back("alpha_rate_" + e);
    for (const char* c : {"level_upper", "level_window", "level_lower", "typical_mass",
                          "typical_log_dim", "typical_count", "mass_ok", "window_ok", "dim_ok"})
        header.push_back(c);

    std::string out;
    append_row(out, header);
    for (const json& row : report.at("rows")) {
        std::vector<std::string> cells{csv_cell(row.at("n")), csv_cell(row.at("entropy")),
                                       csv_cell(row.at("entropy_rate"))};
        for (const std::string& e : eps) cells.push_back(csv_cell(row.at("betas").at(e)));
        for (const std::string& e : eps) cells.push_back(csv_cell(row.at("alphas").at(e)));
        const json& lv = row.at("levels");
        const json& ty = row.at("typical");
        const json& vd = ty.at("verdicts");
        for (const json& v :
             {lv.at("upper"), lv.at("window"), lv.at("lower"), ty.at("mass"), ty.at("log_dim"),
              ty.at("count"), vd.at("mass_ok"), vd.at("window_ok"), vd.at("dim_ok")})
            cells.push_back(csv_cell(v));
        append_row(out, cells);
    }
    return out;
}

std::string sweep_csv(const json& report) {
    const std::vector<std::string> eps = beta_keys(report);
    std::vector<std::string> header{"n", "entropy_rate"};
    for (const std::string& e : eps) header.push_back("beta_rate_" + e);
    for (const char* c : {"typical_mass", "typical_log_dim", "mass_ok", "window_ok", "dim_ok"})
        header.push_back(c);

    std::string out;
    append_row(out, header);
    for (const json& row : report.at("rows")) {
        std::vector<std::string> cells{csv_cell(row.at("n")), csv_cell(row.at("entropy_rate"))};
        for (const std::string& e : eps) cells.push_back(csv_cell(row.at("betas").at(e)));
        const json& ty = row.at("typical");
        const json& vd = ty.at("verdicts");
        for (const json& v : {ty.at("mass"), ty.at("log_dim"), vd.at("mass_ok"),
                              vd.at("window_ok"), vd.at("dim_ok")})
            cells.push_back(csv_cell(v));
        append_row(out, cells);
    }
    return out;
}

std::string decompose_csv(const json& report) {
    std::string out;
    append_row(out, {"l", "k", "divides_l", "equal_entropy", "atypical_count",
                     "atypical_fraction"});
    for (const json& row : report.at("rows"))
        append_row(out, {csv_cell(row.at("l")), csv_cell(row.at("k")),
                         csv_cell(row.at("divides_l")), csv_cell(row.at("equal_entropy")),
                         csv_cell(row.at("atypical_count")),
                         csv_cell(row.at("atypical_fraction"))});
    return out;
}

std::string compress_csv(const json& report) {
    const std::vector<std::string> cols = {
        "n",          "delta",         "delta_prime",   "code_dim",
        "qubit_count", "rate_qubits_per_site", "typical_mass", "trials",
        "seed",       "mean_fidelity", "stderr",        "zero_mass_events"};
    std::string out;
    append_row(out, cols);
    std::vector<std::string> cells;
    for (const std::string& c : cols) cells.push_back(csv_cell(report.at(c)));
    append_row(out, cells);
    return out;
}

// ==== CLI driver ============================================================

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write " + path.string());
    out << content;
    if (!out) throw ParameterError("write failed for " + path.string());
}

void print_verdicts(std::ostream& out, const json& vd) {
    out << "mass_ok=" << (vd.at("mass_ok").get<bool>() ? "yes" : "no")
        << " window_ok=" << (vd.at("window_ok").get<bool>() ? "yes" : "no")
        << " dim_ok=" << (vd.at("dim_ok").get<bool>() ? "yes" : "no");
}

void summarize(std::ostream& out, const RunConfig& cfg, const json& report) {
    switch (cfg.command) {
        case RunConfig::Command::analyze: {
            const json& row = report.at("rows").at(0);
            out << "model " << report.at("model_hash").get<std::string>()
                << "  s = " << format_double(report.at("s").get<double>()) << " nats/site\n";
            out << "n = " << row.at("n") << ": S_n/n = "
                << format_double(row.at("entropy_rate").get<double>());
            for (const auto& item : row.at("betas").items())
                out << "  beta[" << item.key() << "]/n = "
                    << format_double(item.value().get<double>());
            out << "\n";
            out << "typical window: mass = "
                << format_double(row.at("typical").at("mass").get<double>()) << ", ";
            print_verdicts(out, row.at("typical").at("verdicts"));
            out << "\n";
            break;
        }
        case RunConfig::Command::sweep: {
            out << "model " << report.at("model_hash").get<std::string>()
                << "  s = " << format_double(report.at("s").get<double>()) << " nats/site\n";
            const json& rows = report.at("rows");
            const json& last = rows.at(rows.size() - 1);
            out << "n = " << last.at("n") << ": S_n/n = "
                << format_double(last.at("entropy_rate").get<double>()) << ", typical mass = "
                << format_double(last.at("typical").at("mass").get<double>()) << "\n";
            for (const json& t : report.at("trends"))
                out << "eps = " << t.at("epsilon").get<std::string>() << ": |beta/n - s| "
                    << format_double(t.at("deviation_first").get<double>()) << " (n="
                    << t.at("n_first") << ") -> "
                    << format_double(t.at("deviation_last").get<double>()) << " (n="
                    << t.at("n_last") << ")"
                    << (t.at("deviation_shrinks").get<bool>() ? ", shrinks" : ", grows") << "\n";
            break;
        }
        case RunConfig::Command::decompose: {
            out << "model " << report.at("model_hash").get<std::string>() << "  period "
                << report.at("period") << "  basis "
                << report.at("classical_basis").get<std::string>() << "\n";
            for (const json& row : report.at("rows"))
                out << "l = " << row.at("l") << ": k = " << row.at("k") << ", equal entropies: "
                    << (row.at("equal_entropy").get<bool>() ? "yes" : "no") << ", atypical "
                    << row.at("atypical_count") << "/" << row.at("k") << "\n";
            break;
        }
        case RunConfig::Command::compress: {
            out << "model " << report.at("model_hash").get<std::string>() << "  n = "
                << report.at("n") << "\n";
            out << "code dim " << report.at("code_dim") << " (" << report.at("qubit_count")
                << " qubits, " << format_double(report.at("rate_qubits_per_site").get<double>())
                << " qubits/site)\n";
            out << "typical mass " << format_double(report.at("typical_mass").get<double>())
                << ", mean fidelity "
                << format_double(report.at("mean_fidelity").get<double>()) << " +/- "
                << format_double(report.at("stderr").get<double>()) << " ("
                << report.at("trials") << " trials, seed " << report.at("seed") << ")\n";
            break;
        }
        case RunConfig::Command::selftest:
            break;
    }
}

}  // namespace

int run_cli(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == RunConfig::Command::selftest) {
            const json report = selftest_report();
            for (const json& suite : report.at("suites"))
                out << (suite.at("passed").get<bool>() ? "ok   " : "FAIL ")
                    << suite.at("name").get<std::string>() << " - "
                    << suite.at("detail").get<std::string>() << "\n";
            const bool all = report.at("all_passed").get<bool>();
            out << (all ? "selftest passed" : "selftest FAILED") << "\n";
            return all ? 0 : 3;
        }

        if (cfg.model_path.empty()) throw ParameterError("a model file is required (--model)");
        const SourceModel model = load_model(cfg.model_path);

        json report;
        std::string csv;
        std::string base;
        switch (cfg.command) {
            case RunConfig::Command::analyze:
                report = analyze_report(
                    model, AnalyzeOptions{cfg.n, cfg.epsilons, cfg.delta, cfg.delta_prime,
                                          cfg.max_dim});
                csv = analyze_csv(report);
                base = "analyze";
                break;
            case RunConfig::Command::sweep:
                report = sweep_report(
                    model, SweepOptions{cfg.n_max, cfg.epsilons, cfg.delta, cfg.max_dim});
                csv = sweep_csv(report);
                base = "sweep";
                break;
            case RunConfig::Command::decompose:
                report = decompose_report(model, DecomposeOptions{cfg.l_max, cfg.eta});
                csv = decompose_csv(report);
                base = "decompose";
                break;
            case RunConfig::Command::compress:
                report = compress_report(
                    model, CompressOptions{cfg.n, cfg.delta, cfg.delta_prime, cfg.trials,
                                           cfg.seed, cfg.max_dim});
                csv = compress_csv(report);
                base = "compress";
                break;
            case RunConfig::Command::selftest:
                break;  // handled above
        }

        const std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        std::vector<std::string> written;
        if (cfg.format != RunConfig::Format::csv) {
            write_file(dir / (base + ".json"), report.dump(2) + "\n");
            written.push_back(base + ".json");
        }
        if (cfg.format != RunConfig::Format::json) {
            write_file(dir / (base + ".csv"), csv);
            written.push_back(base + ".csv");
        }

        summarize(out, cfg, report);
        out << "wrote";
        for (const std::string& name : written) out << " " << (dir / name).string();
        out << "\n";
        return 0;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace aeplab
