#include "aeplab/report.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"

#include "aeplab/errors.hpp"

using namespace aeplab;
using nlohmann::json;

namespace {

SourceModel iid_09() {
    const double d[] = {0.9, 0.1};
    return IIDProduct{DensityOperator(ComplexMatrix::diagonal(d))};
}

SourceModel period2_model() {
    return SourceModel{ClassicalMarkov({{0.0, 0.0, 0.7, 0.3},
                                        {0.0, 0.0, 0.3, 0.7},
                                        {0.7, 0.3, 0.0, 0.0},
                                        {0.3, 0.7, 0.0, 0.0}})};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("aeplab_report_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_double(12.0) == "12");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(1e300) == "1e+300");
    // round trip: parsing the output recovers the exact double
    CHECK(std::stod(format_double(0.30000000000000004)) == 0.30000000000000004);
}

TEST_CASE("analyze report") {
    AnalyzeOptions opt;
    opt.n = 12;
    const json rep = analyze_report(iid_09(), opt);
    CHECK(rep.at("command") == "analyze");
    CHECK(rep.at("delta") == 0.1);
    CHECK(rep.at("delta_prime") == 0.05);
    CHECK(rep.at("s").get<double>() == doctest::Approx(0.3250829733914482).epsilon(1e-15));
    REQUIRE(rep.at("rows").size() == 1);
    const json& row = rep.at("rows").at(0);
    CHECK(row.at("n") == 12);
    CHECK(row.at("betas").contains("0.1"));
    CHECK(row.at("betas").contains("0.01"));
    CHECK(row.at("beta_detail").at("0.1").at("count") == 108);
    CHECK(row.at("alphas").at("0.1").get<double>() ==
          doctest::Approx(row.at("betas").at("0.1").get<double>()).epsilon(1e-12));
    CHECK(row.at("levels").at("window").get<double>() ==
          doctest::Approx(0.376572715308).epsilon(1e-11));
    CHECK(row.at("typical").at("count") == 12);
    CHECK(row.at("typical").at("verdicts").at("window_ok") == true);
    CHECK(row.at("typical").at("verdicts").at("mass_ok") == false);

    SUBCASE("serialization is deterministic") {
        const json again = analyze_report(iid_09(), opt);
        CHECK(rep.dump(2) == again.dump(2));
    }
    SUBCASE("an empty window serializes log_dim as null / -inf") {
        AnalyzeOptions narrow;
        narrow.n = 8;
        narrow.delta = 0.05;
        const json empty = analyze_report(iid_09(), narrow);
        CHECK(empty.at("rows").at(0).at("typical").at("log_dim").get<double>() ==
              -std::numeric_limits<double>::infinity());
        // nlohmann serializes non-finite values as null; the CSV cell stays -inf
        const json reparsed = json::parse(empty.dump(2));
        CHECK(reparsed.at("rows").at(0).at("typical").at("log_dim").is_null());
        CHECK(analyze_csv(empty).find("-inf") != std::string::npos);
        CHECK(analyze_csv(reparsed).find("-inf") != std::string::npos);
    }
    SUBCASE("epsilons must be present") {
        AnalyzeOptions bad;
        bad.epsilons.clear();
        CHECK_THROWS_AS(analyze_report(iid_09(), bad), ParameterError);
    }
}

TEST_CASE("sweep report") {
    SweepOptions opt;
    const json rep = sweep_report(iid_09(), opt);
    CHECK(rep.at("command") == "sweep");
    REQUIRE(rep.at("rows").size() == 12);
    CHECK(rep.at("rows").at(11).at("n") == 12);
    CHECK(rep.at("rows").at(11).at("betas").at("0.1").get<double>() ==
          doctest::Approx(0.39017760226035164).epsilon(1e-13));
    REQUIRE(rep.at("trends").size() == 2);
    CHECK(rep.at("trends").at(0).at("epsilon") == "0.1");  // input epsilon order
    CHECK(rep.at("trends").at(1).at("epsilon") == "0.01");
    CHECK(rep.at("trends").at(0).at("deviation_shrinks") == true);

    SUBCASE("csv projection") {
        const std::string csv = sweep_csv(rep);
        std::size_t lines = 0;
        for (char c : csv)
            if (c == '\n') ++lines;
        CHECK(lines == 13);
        CHECK(csv.rfind("n,entropy_rate,beta_rate_0.01,beta_rate_0.1,typical_mass,", 0) == 0);
    }
    SUBCASE("serialization is deterministic") {
        CHECK(sweep_report(iid_09(), opt).dump() == rep.dump());
    }
}

TEST_CASE("decompose report") {
    DecomposeOptions opt;
    opt.l_max = 4;
    const json rep = decompose_report(period2_model(), opt);
    CHECK(rep.at("command") == "decompose");
    CHECK(rep.at("period") == 2);
    CHECK(rep.at("classical_basis") == "computational");
    REQUIRE(rep.at("rows").size() == 4);
    const json& row2 = rep.at("rows").at(1);
    CHECK(row2.at("l") == 2);
    CHECK(row2.at("k") == 2);
    CHECK(row2.at("divides_l") == true);
    CHECK(row2.at("equal_entropy") == true);
    CHECK(row2.at("atypical_fraction") == 0.0);
    REQUIRE(row2.at("components").size() == 2);
    CHECK(row2.at("components").at(0).at("entropy_rate_Gl").get<double>() ==
          doctest::Approx(1.221728604109787).epsilon(1e-12));
    CHECK(row2.at("components").at(0).at("s_finite_box").get<double>() ==
          doctest::Approx(0.6520057413074194).epsilon(1e-12));
    const json& row3 = rep.at("rows").at(2);
    CHECK(row3.at("k") == 1);
    CHECK(row3.at("atypical_fraction") == 1.0);

    SUBCASE("csv projection") {
        const std::string csv = decompose_csv(rep);
        CHECK(csv.rfind("l,k,divides_l,equal_entropy,atypical_count,atypical_fraction\n", 0) ==
              0);
        CHECK(csv.find("2,2,1,1,0,0\n") != std::string::npos);
    }
}

TEST_CASE("compress report") {
    CompressOptions opt;
    opt.n = 8;
    opt.delta = 0.25;
    opt.delta_prime = 0.25;
    opt.trials = 400;
    opt.seed = 7;
    const json rep = compress_report(iid_09(), opt);
    CHECK(rep.at("command") == "compress");
    CHECK(rep.at("n") == 8);
    CHECK(rep.at("code_dim") == 9);
    CHECK(rep.at("qubit_count") == 4);
    CHECK(rep.at("seed") == 7);
    CHECK(rep.at("trials") == 400);
    CHECK(rep.contains("stderr"));
    CHECK(rep.at("typical_mass").get<double>() ==
          doctest::Approx(0.8131047300000002).epsilon(1e-12));

    SUBCASE("serialization is deterministic") {
        CHECK(compress_report(iid_09(), opt).dump() == rep.dump());
    }
    SUBCASE("csv has exactly one data row") {
        const std::string csv = compress_csv(rep);
        std::size_t lines = 0;
        for (char c : csv)
            if (c == '\n') ++lines;
        CHECK(lines == 2);
        CHECK(csv.rfind("n,delta,delta_prime,code_dim,", 0) == 0);
    }
}

TEST_CASE("selftest report") {
    const json rep = selftest_report();
    CHECK(rep.at("command") == "selftest");
    CHECK(rep.at("all_passed") == true);
    CHECK(rep.at("suites").size() == 6);
    for (const json& suite : rep.at("suites")) CHECK(suite.at("passed") == true);
}

TEST_CASE("run_cli") {
    const std::string model_path =
        (std::filesystem::temp_directory_path() / "aeplab_cli_model.json").string();
    {
        std::ofstream out(model_path);
        out << R"({"type":"iid","site_density":[[0.9,0.0],[0.0,0.1]]})";
    }

    SUBCASE("analyze writes both formats and reports success") {
        TempDir dir("analyze");
        RunConfig cfg;
        cfg.command = RunConfig::Command::analyze;
        cfg.model_path = model_path;
        cfg.output_dir = dir.path.string();
        cfg.n = 6;
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 0);
        CHECK(std::filesystem::exists(dir.path / "analyze.json"));
        CHECK(std::filesystem::exists(dir.path / "analyze.csv"));
        CHECK(out.str().find("wrote") != std::string::npos);
        CHECK(err.str().empty());
        const json parsed = json::parse(slurp(dir.path / "analyze.json"));
        CHECK(parsed.at("command") == "analyze");
    }
    SUBCASE("repeat runs are byte identical") {
        TempDir a("sweep_a"), b("sweep_b");
        RunConfig cfg;
        cfg.command = RunConfig::Command::sweep;
        cfg.model_path = model_path;
        cfg.n_max = 8;
        std::ostringstream out, err;
        cfg.output_dir = a.path.string();
        REQUIRE(run_cli(cfg, out, err) == 0);
        cfg.output_dir = b.path.string();
        REQUIRE(run_cli(cfg, out, err) == 0);
        CHECK(slurp(a.path / "sweep.json") == slurp(b.path / "sweep.json"));
        CHECK(slurp(a.path / "sweep.csv") == slurp(b.path / "sweep.csv"));
    }
    SUBCASE("json-only format writes one file") {
        TempDir dir("json_only");
        RunConfig cfg;
        cfg.command = RunConfig::Command::analyze;
        cfg.model_path = model_path;
        cfg.output_dir = dir.path.string();
        cfg.format = RunConfig::Format::json;
        cfg.n = 4;
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 0);
        CHECK(std::filesystem::exists(dir.path / "analyze.json"));
        CHECK_FALSE(std::filesystem::exists(dir.path / "analyze.csv"));
    }
    SUBCASE("missing model file exits 1") {
        RunConfig cfg;
        cfg.command = RunConfig::Command::analyze;
        cfg.model_path = "/nonexistent/model.json";
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 1);
        CHECK(err.str().find("error") != std::string::npos);
    }
    SUBCASE("no model path exits 1") {
        RunConfig cfg;
        cfg.command = RunConfig::Command::sweep;
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 1);
    }
    SUBCASE("capacity overflow exits 2") {
        TempDir dir("capacity");
        RunConfig cfg;
        cfg.command = RunConfig::Command::analyze;
        cfg.model_path = model_path;
        cfg.output_dir = dir.path.string();
        cfg.n = 40;
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 2);
    }
    SUBCASE("selftest prints one line per suite") {
        RunConfig cfg;
        cfg.command = RunConfig::Command::selftest;
        std::ostringstream out, err;
        CHECK(run_cli(cfg, out, err) == 0);
        CHECK(out.str().find("ok   ") != std::string::npos);
        CHECK(out.str().find("selftest passed") != std::string::npos);
    }
    std::filesystem::remove(model_path);
}
