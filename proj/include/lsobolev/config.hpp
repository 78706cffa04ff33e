#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsobolev/weighted_norms.hpp"

namespace lsobolev {

/// Pass/fail thresholds for every verdict the reports emit.
struct Tolerances {
    double orthonormality = 1e-9;
    double oracle_low = 1e-9;  // n <= oracle_low_n
    double oracle_high = 1e-7; // n <= oracle_high_n
    int oracle_low_n = 50;
    int oracle_high_n = 150;
    int orthonormality_n = 100;
    double norm_ratio = 0.05;
    double representation = 1e-8;
    int representation_n = 150;
    double nonzero_factor = 50.0;
    double mh_ratio_low = 1.6;
    double mh_ratio_high = 2.4;
    double slope = 0.1;
    double log_correlation = 0.99;
    double fourier_vanish = 1e-9;
    double g_hat_limit = 0.05;
    double deriv_vanish = 1e-9;
    double classical = 1e-12;
    double sign_change_epsilon = 0.5;
};

struct ExperimentConfig {
    double alpha = 0.0;
    std::vector<double> masses;
    int n_max = 200;
    /// Empty means eight evenly spaced degrees ending at n_max.
    std::vector<int> n_grid;
    std::vector<double> p_list{kInfinity};
    BetaMode mode = BetaMode::beta_alpha;
    double mh_x_max = 30.0;
    int mh_points = 600;
    /// Empty means n_max/8, n_max/4, n_max/2, n_max.
    std::vector<int> mh_degrees;
    Tolerances tol;

    /// Copy with the empty grids filled in from n_max.
    ExperimentConfig resolved() const;

    /// Throws DomainError on anything the modules would reject, before any work starts.
    void validate() const;

    /// key=value pairs in a fixed order, for report headers.
    std::vector<std::pair<std::string, std::string>> describe() const;
};

/// Parses
///   # comment
///   [experiment]   alpha, masses, n_max, n_grid, p, mode
///   [mh]           x_max, points, degrees
///   [tolerances]   any field of Tolerances
/// Unknown sections or keys are errors. Values not given keep `base`'s.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
/// Accepts "inf" / "infinity" for p = infinity.
std::vector<double> parse_p_list(const std::string& text);

/// %.17g, with "inf" for infinity.
std::string format_double(double v);

} // namespace lsobolev
