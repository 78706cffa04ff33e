#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lsobolev/laguerre.hpp"
#include "lsobolev/sobolev_basis.hpp"
#include "lsobolev/weighted_norms.hpp"

namespace lsobolev {

/// Multipliers c_{k,n} of T_n f = sum_{k<=n} c_{k,n} f^(k) q_k. Real-valued.
class CoefficientFamily {
public:
    using Function = std::function<double(int k, int n)>;

    explicit CoefficientFamily(Function c, std::string name = "custom");
    /// c_{k,n} = 1: the partial sums S_n.
    static CoefficientFamily partial_sums();

    double operator()(int k, int n) const { return c_(k, n); }
    const std::string& name() const { return name_; }

private:
    Function c_;
    std::string name_;
};

/// g_n^{alpha,j}(x) = x^j [L_n^{alpha+j}(x) - s L_{n+2}^{alpha+j}(x)],
/// s = sqrt((n+1)(n+2) / ((n+alpha+j+1)(n+alpha+j+2))), stored in {l_k^alpha}.
struct TestFunction {
    int n = 0;
    int j = 0;
    LaguerreExpansion expansion{0.0, {}};
};

/// Exact construction: the bracket is written in the L^{alpha+j} basis and
/// multiplied by x one power at a time using
///   x L_k^{g} = (k+g) L_k^{g-1} - (k+1) L_{k+1}^{g-1},
/// which lands in the L^alpha basis after j steps. Only indices n..n+j+2 are nonzero.
/// Requires j >= N+1 and checks g^{(i)}(0) = 0 for i <= N (throws NumericFailure
/// when the relative cancellation test fails).
TestFunction build_test_function(double alpha, const SobolevProduct& S, int n, int j);

/// |f^{(i)}(0)| divided by sum_k |f_k (l_k)^{(i)}(0)|: how far the derivative is from
/// exact cancellation on the scale of its own terms.
double relative_deriv_at_zero(const LaguerreExpansion& f, int i);

/// a_{0,j}(alpha, n) = Gamma(n+alpha+j+1) / Gamma(n+alpha+1).
double a0j(double alpha, int n, int j);

/// Smallest j with j >= N+1 and j > alpha - 1/2 - 2(alpha+1)/p (p may be infinite).
int choose_test_index(double alpha, const SobolevProduct& S, double p);

/// f^(k) = <f, q_k>_S, with q_k^{(i)}(0) taken from the cache.
double fourier_coeff(const LaguerreExpansion& f, int k, const SobolevBasisCache& cache);

/// Same inner product for a test function, with g^{(i)}(0) taken from the factor x^j
/// (zero for i < j, i!/(i-j)! times the bracket's derivative otherwise) instead of
/// summing the expansion, whose terms cancel down to roundoff of size ~n^{j+i}.
double fourier_coeff(const TestFunction& g, int k, const SobolevBasisCache& cache);

/// g^{(i)}(0) from the product structure.
double test_function_deriv_at_zero(const TestFunction& g, int i);

/// sum_{k<=n} c_{k,n} f^(k) q_k.
LaguerreExpansion apply_T(const LaguerreExpansion& f, const CoefficientFamily& c, int n,
                          const SobolevBasisCache& cache);

/// g^(n) through a_{0,j} ||L_n||^2 / <Q_n,Q_n>_S^{1/2}.
double test_coeff_closed_form(const SobolevBasisCache& cache, int n, int j);

struct CohenBound {
    int n = 0;
    int j = 0;
    double p = 0.0;
    BetaMode mode = BetaMode::beta_alpha;
    double g_norm = 0.0;  // ||g||_{S_p^beta}
    double g_hat_n = 0.0; // closed form
    double g_hat_n_inner = 0.0; // <g, q_n>_S computed directly
    double q_norm = 0.0;  // ||q_n||_{L_p(x^beta dx)}
    double bound = 0.0;   // |c_{n,n}| |g^(n)| q_norm / g_norm
};

/// Lower bound for ||T_n||_{[S_p^beta]} realized by the witness g_n^{alpha,j}.
/// j < 0 selects choose_test_index.
CohenBound cohen_lower_bound(int n, int j, double p, BetaMode mode, const CoefficientFamily& c,
                             const SobolevBasisCache& cache, const NormOptions& options = {});

/// Growth exponent of the bound for q_0 < p <= inf:
/// (2alpha+1)/2 - (2alpha+2)/p (beta_alpha) or 1/2 - 2/p (beta_p_alpha_over_2).
double cohen_exponent(double alpha, double p, BetaMode mode);

/// Where p sits relative to the Pollard interval (p_0, q_0).
enum class PollardRegion { below_p0, at_p0, inside, at_q0, above_q0 };
PollardRegion pollard_region(double alpha, double p, BetaMode mode);
const char* to_string(PollardRegion region);

} // namespace lsobolev
