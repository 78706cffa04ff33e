#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lsobolev/config.hpp"
#include "lsobolev/errors.hpp"
#include "lsobolev/reports.hpp"

using namespace lsobolev;

namespace {

// Exit codes: 0 all verdicts pass, 1 some verdict failed, 2 bad input, 3 numeric failure.
constexpr int kVerdictFailed = 1;
constexpr int kBadInput = 2;
constexpr int kNumericFailure = 3;

struct Flags {
    std::optional<double> alpha;
    std::optional<std::string> masses;
    std::optional<int> n_max;
    std::optional<std::string> n_grid;
    std::optional<std::string> p;
    std::optional<std::string> mode;
    std::string out = "lsobolev_out";
    std::string config;
};

ExperimentConfig build_config(const Flags& f) {
    ExperimentConfig cfg;
    if (!f.config.empty())
        cfg = load_config(f.config, cfg);
    if (f.alpha)
        cfg.alpha = *f.alpha;
    if (f.masses)
        cfg.masses = parse_double_list(*f.masses);
    if (f.n_max)
        cfg.n_max = *f.n_max;
    if (f.n_grid)
        cfg.n_grid = parse_int_list(*f.n_grid);
    if (f.p)
        cfg.p_list = parse_p_list(*f.p);
    if (f.mode)
        cfg.mode = beta_mode_from_string(*f.mode);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Laguerre-Sobolev orthonormal polynomials: construction and asymptotic checks"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--alpha", f.alpha, "Laguerre parameter, alpha > -1");
    app.add_option("--masses", f.masses, "comma list M_0,...,M_N (empty for the classical case)");
    app.add_option("--nmax", f.n_max, "highest degree built");
    app.add_option("--ngrid", f.n_grid, "comma list of degrees used for fits and limits");
    app.add_option("--p", f.p, "comma list of exponents, 'inf' allowed");
    app.add_option("--mode", f.mode, "weight regime: alpha (x^alpha) or palpha2 (x^{alpha p/2})")
        ->check(CLI::IsMember({"alpha", "palpha2"}));
    app.add_option("--out", f.out, "output directory")->capture_default_str();
    app.add_option("--config", f.config, "key = value config file with [experiment], [mh], [tolerances]");

    using Command = CommandResult (*)(const ExperimentConfig&, const std::filesystem::path&);
    const std::vector<std::tuple<std::string, std::string, Command>> verbs{
        {"basis", "build the basis, write the cache and b_j table", cmd_basis},
        {"mh", "Mehler-Heine profiles against the Bessel-type limit", cmd_mh},
        {"ratios", "derivative ratios at the origin", cmd_ratios},
        {"norms", "weighted L_p norm growth", cmd_norms},
        {"cohen", "Cohen-type lower bounds for T_n", cmd_cohen},
        {"all", "every report above", cmd_all},
    };
    Command chosen = nullptr;
    std::string chosen_name;
    for (const auto& [name, help, fn] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&chosen, &chosen_name, fn = fn, name = name] {
            chosen = fn;
            chosen_name = name;
        });
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = build_config(f);
        const CommandResult result = chosen(cfg, f.out);
        for (const Verdict& v : result.verdicts)
            std::printf("%s %-40s measured=%s expected=%s tol=%s  %s\n", v.pass ? "PASS" : "FAIL",
                        v.check_name.c_str(), format_double(v.measured).c_str(), format_double(v.expected).c_str(),
                        format_double(v.tolerance).c_str(), v.detail.c_str());
        std::printf("%s: %zu files written to %s, %s\n", chosen_name.c_str(), result.files.size(), f.out.c_str(),
                    result.all_pass() ? "all verdicts pass" : "some verdicts failed");
        return result.all_pass() ? 0 : kVerdictFailed;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
}
