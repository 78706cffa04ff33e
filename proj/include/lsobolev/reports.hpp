#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsobolev/cohen_bounds.hpp"
#include "lsobolev/config.hpp"
#include "lsobolev/sobolev_basis.hpp"
#include "lsobolev/weighted_norms.hpp"

namespace lsobolev {

struct Verdict {
    std::string check_name; // one of check_registry()
    bool pass = false;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct CheckInfo {
    std::string name;
    std::string statement;
};

/// Stable names for every verdict, one per mathematical statement checked.
const std::vector<CheckInfo>& check_registry();

// Checks. Each returns the verdicts for one cache; the acceptance suite runs
// the same functions over its configuration matrix.

/// max over i <= j <= n_upto of |<q_i,q_j>_S - delta_ij|.
Verdict check_orthonormality(const SobolevBasisCache& cache, int n_upto, double tol);

/// Max per-degree max|a - b| / max|a| between the two constructions, up to n_low and n_high.
std::vector<Verdict> check_oracle_agreement(const SobolevBasisCache& cache, const Tolerances& tol);

/// n^{alpha+2k+1} q_deriv_ratio settles to a nonzero limit (M_k > 0), or the ratio
/// itself does (M_k = 0).
std::vector<Verdict> check_derivative_ratios(const SobolevBasisCache& cache, std::span<const int> grid,
                                             const Tolerances& tol);

/// |<Q_n,Q_n>_S / ||L_n||^2 - 1| at n_late is within tolerance and below its value at n_early.
Verdict check_norm_equivalence(const SobolevBasisCache& cache, int n_early, int n_late, double tol);

/// Zero pattern of the extrapolated b_j limits and the representation residual.
std::vector<Verdict> check_connection_limits(const SobolevBasisCache& cache, std::span<const int> grid,
                                             const Tolerances& tol);

struct MehlerHeineSummary {
    std::vector<double> xs;
    std::vector<double> limit;
    std::vector<int> degrees;
    std::vector<std::vector<double>> profiles;
    std::vector<double> deviations;
    std::vector<int> sign_changes; // on [sign_change_epsilon, x_max]
    int limit_sign_changes = 0;
    std::vector<double> b_limits;
};

MehlerHeineSummary mehler_heine_summary(const SobolevBasisCache& cache, const ExperimentConfig& config);
std::vector<Verdict> check_mehler_heine(const MehlerHeineSummary& mh, const Tolerances& tol);

/// Empty when (alpha, p, mode) is outside the hypotheses of the growth statements or
/// p < q_0, where no rate is claimed.
std::optional<Verdict> check_norm_growth(const GrowthReport& report, double alpha, const Tolerances& tol);

struct CohenSweep {
    double p = 0.0;
    BetaMode mode = BetaMode::beta_alpha;
    std::string region;
    std::string status; // "checked", "report only", "by duality, not computed", "inadmissible"
    std::vector<CohenBound> rows;
    LineFit fit;
    double theoretical = 0.0;
};

CohenSweep cohen_sweep(const SobolevBasisCache& cache, double p, BetaMode mode, std::span<const int> grid);
std::vector<Verdict> check_cohen(const CohenSweep& sweep, double alpha, const Tolerances& tol);

/// Vanishing coefficients below n, the normalized g^(n) limit, vanishing derivatives at 0.
std::vector<Verdict> check_test_functions(const SobolevBasisCache& cache, std::span<const int> grid,
                                          const Tolerances& tol);

/// With every mass zero, q_n must be l_n exactly. Empty otherwise.
std::optional<Verdict> check_classical(const SobolevBasisCache& cache, double tol);

// Commands. Each writes its CSV/JSON files plus verdicts_<verb>.json into `out`
// and returns the verdicts; the CLI exit code is 0 iff all pass.

struct CommandResult {
    std::vector<Verdict> verdicts;
    std::vector<std::filesystem::path> files;
    bool all_pass() const;
};

CommandResult cmd_basis(const ExperimentConfig& config, const std::filesystem::path& out);
CommandResult cmd_mh(const ExperimentConfig& config, const std::filesystem::path& out);
CommandResult cmd_ratios(const ExperimentConfig& config, const std::filesystem::path& out);
CommandResult cmd_norms(const ExperimentConfig& config, const std::filesystem::path& out);
CommandResult cmd_cohen(const ExperimentConfig& config, const std::filesystem::path& out);
CommandResult cmd_all(const ExperimentConfig& config, const std::filesystem::path& out);

/// "# lsobolev report v1 kind=<kind> key=value ..." built from the resolved config.
std::string report_header(const std::string& kind, const ExperimentConfig& config);

std::string verdicts_to_json(const std::vector<Verdict>& verdicts);

} // namespace lsobolev
