#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsobolev/config.hpp"
#include "lsobolev/errors.hpp"
#include "lsobolev/reports.hpp"

using namespace lsobolev;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("lsobolev_test_" + name);
    fs::remove_all(d);
    return d;
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.alpha = 0.5;
    c.masses = {1.0, 0.0, 1.0};
    c.n_max = 60;
    c.n_grid = {20, 30, 40, 50, 60};
    c.p_list = {8.0, kInfinity};
    return c;
}

} // namespace

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(kInfinity) == "inf");
    CHECK(format_double(-kInfinity) == "-inf");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("list parsing") {
    CHECK(parse_double_list("1, 0,0.5") == std::vector<double>{1.0, 0.0, 0.5});
    CHECK(parse_double_list("").empty());
    CHECK(parse_int_list("25,50") == std::vector<int>{25, 50});
    const auto p = parse_p_list("4, inf, Infinity");
    CHECK(p[0] == 4.0);
    CHECK(std::isinf(p[1]));
    CHECK(std::isinf(p[2]));
    CHECK_THROWS_AS(parse_double_list("1,x"), DomainError);
    CHECK_THROWS_AS(parse_int_list("2.5"), DomainError);
}

TEST_CASE("config files") {
    const ExperimentConfig c = parse_config(R"(
# comment
[experiment]
alpha = 1
masses = 0.5, 0, 0, 2
n_max = 120
n_grid = 30,60,90,120
p = 6, inf
mode = palpha2

[mh]
x_max = 20
degrees = 30, 120

[tolerances]
slope = 0.2
oracle_low_n = 40
)");
    CHECK(c.alpha == 1.0);
    CHECK(c.masses.size() == 4);
    CHECK(c.n_max == 120);
    CHECK(c.n_grid.back() == 120);
    CHECK(c.mode == BetaMode::beta_p_alpha_over_2);
    CHECK(c.p_list.size() == 2);
    CHECK(c.mh_x_max == 20.0);
    CHECK(c.mh_degrees == std::vector<int>{30, 120});
    CHECK(c.tol.slope == 0.2);
    CHECK(c.tol.oracle_low_n == 40);
    CHECK(c.tol.orthonormality == 1e-9);
    CHECK_NOTHROW(c.validate());

    CHECK_THROWS_AS(parse_config("[experiment]\nbogus = 1\n"), DomainError);
    CHECK_THROWS_AS(parse_config("[nowhere]\n"), DomainError);
    CHECK_THROWS_AS(parse_config("alpha = 1\n"), DomainError);
    try {
        parse_config("[experiment]\n\nalpha = oops\n");
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("config line 3") != std::string::npos);
    }
}

TEST_CASE("config validation and defaults") {
    ExperimentConfig c;
    c = c.resolved();
    CHECK(c.n_grid == std::vector<int>{25, 50, 75, 100, 125, 150, 175, 200});
    CHECK(c.mh_degrees == std::vector<int>{25, 50, 100, 200});
    CHECK_NOTHROW(c.validate());

    ExperimentConfig bad = c;
    bad.alpha = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.masses = {1.0, -1.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.n_grid = {50, 25, 75, 100};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = c;
    bad.alpha = -0.5;
    bad.mode = BetaMode::beta_p_alpha_over_2;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("check registry names are unique") {
    const auto& reg = check_registry();
    CHECK(reg.size() >= 10);
    for (std::size_t i = 0; i < reg.size(); ++i)
        for (std::size_t j = i + 1; j < reg.size(); ++j)
            CHECK(reg[i].name != reg[j].name);
}

TEST_CASE("verdict JSON round trip") {
    std::vector<Verdict> vs{{"orthonormality", true, 1e-13, 0.0, 1e-9, "x"},
                            {"mehler_heine.rate", false, 1.3, 2.0, 0.4, ""}};
    const auto doc = nlohmann::json::parse(verdicts_to_json(vs));
    CHECK(doc["all_pass"] == false);
    REQUIRE(doc["verdicts"].size() == 2);
    CHECK(doc["verdicts"][0]["check_name"] == "orthonormality");
    CHECK(doc["verdicts"][0]["pass"] == true);
    CHECK(doc["verdicts"][1]["measured"].get<double>() == 1.3);
    CHECK(doc["verdicts"][1]["expected"].get<double>() == 2.0);
    CHECK(doc["verdicts"][1]["tolerance"].get<double>() == 0.4);
}

TEST_CASE("report header") {
    const std::string h = report_header("basis", small_config());
    CHECK(h.rfind("# lsobolev report v1 kind=basis", 0) == 0);
    CHECK(h.find("alpha=0.5") != std::string::npos);
    CHECK(h.find("masses=1,0,1") != std::string::npos);
    CHECK(h.find('\n') == std::string::npos);
}

TEST_CASE("classical basis command") {
    ExperimentConfig c = small_config();
    c.masses = {0.0, 0.0};
    const fs::path dir = scratch_dir("classical");
    const CommandResult r = cmd_basis(c, dir);
    bool saw_classical = false;
    for (const auto& v : r.verdicts)
        if (v.check_name == "classical.degeneration") {
            saw_classical = true;
            CHECK(v.pass);
        }
    CHECK(saw_classical);
    // b table is the identity pattern: b_0 = 1, others 0.
    std::ifstream in(dir / "basis_summary.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# lsobolev report v1", 0) == 0);
    std::getline(in, line);
    CHECK(line == "n,sobolev_norm_sq_Q,norm_ratio,b_0,b_1,b_2");
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string n, nrm, ratio, b0, b1, b2;
        std::getline(ss, n, ',');
        std::getline(ss, nrm, ',');
        std::getline(ss, ratio, ',');
        std::getline(ss, b0, ',');
        std::getline(ss, b1, ',');
        std::getline(ss, b2, ',');
        if (b0.empty())
            continue;
        CHECK(std::stod(b0) == doctest::Approx(1.0));
        CHECK(std::abs(std::stod(b1)) <= 1e-12);
        CHECK(std::abs(std::stod(b2)) <= 1e-12);
    }
}

TEST_CASE("commands write their files and are deterministic") {
    const ExperimentConfig c = small_config();
    const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    const CommandResult ra = cmd_all(c, a);
    const CommandResult rb = cmd_all(c, b);
    CHECK(ra.files.size() == rb.files.size());
    for (const char* f : {"basis.json", "basis_summary.csv", "connection_limits.csv", "ratios.csv", "mh_summary.csv",
                          "cohen.csv", "cohen.json", "verdicts_all.json"})
        CHECK(fs::exists(a / f));
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK_MESSAGE(slurp(entry.path()) == slurp(other), entry.path().filename().string());
    }
    const auto doc = nlohmann::json::parse(slurp(a / "verdicts_all.json"));
    CHECK(doc["verdicts"].size() == ra.verdicts.size());
    CHECK(doc["all_pass"].get<bool>() == ra.all_pass());

    // Serialized cache reloads.
    const SobolevBasisCache cache = deserialize_cache(slurp(a / "basis.json"));
    CHECK(cache.n_max() == 60);
}

TEST_CASE("norms at q_0 report the log case") {
    ExperimentConfig c = small_config();
    c.alpha = 0.0;
    c.masses = {1.0};
    c.n_max = 120;
    c.n_grid = {25, 50, 75, 100, 120};
    c.p_list = {4.0};
    const CommandResult r = cmd_norms(c, scratch_dir("norms"));
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0].check_name == "norm_growth.log_case");
}

TEST_CASE("ratios verdict for a single mass") {
    ExperimentConfig c = small_config();
    c.masses = {1.0};
    const CommandResult r = cmd_ratios(c, scratch_dir("ratios"));
    REQUIRE_FALSE(r.verdicts.empty());
    CHECK(r.verdicts[0].check_name == "derivative_ratio.mass");
}

TEST_CASE("invalid configs are rejected before any work") {
    ExperimentConfig c = small_config();
    c.alpha = -1.0;
    const fs::path dir = scratch_dir("reject");
    CHECK_THROWS_AS(cmd_basis(c, dir), DomainError);
    CHECK_FALSE(fs::exists(dir));
}
