#include "lsobolev/sobolev_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "lsobolev/errors.hpp"
#include "lsobolev/quadrature.hpp"
#include "lsobolev/special.hpp"

namespace lsobolev {

namespace {

constexpr int kSerialVersion = 1;

void require_finite(double v, const char* what, int stage, int n) {
    if (!std::isfinite(v))
        throw NumericFailure(std::string(what) + " is not finite (stage " + std::to_string(stage) + ", degree " +
                             std::to_string(n) + ")");
}

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

// Packs raw Q_n data into an entry holding the orthonormal q_n.
SobolevBasisEntry make_entry(double alpha, std::vector<double> Q_coeffs, double norm_sq,
                             const std::vector<double>& Q_derivs) {
    // Division rather than a reciprocal: an untouched stage-0 coefficient sqrt(norm_sq) becomes exactly 1.
    const double scale = std::sqrt(norm_sq);
    for (double& c : Q_coeffs)
        c /= scale;
    SobolevBasisEntry e{LaguerreExpansion(alpha, std::move(Q_coeffs)), norm_sq, {}, {}};
    e.derivs_at_zero.reserve(Q_derivs.size());
    for (double d : Q_derivs)
        e.derivs_at_zero.push_back(d / scale);
    return e;
}

void fill_connection_coeffs(std::vector<SobolevBasisEntry>& entries);

} // namespace

SobolevProduct::SobolevProduct(double alpha, std::vector<double> masses)
    : alpha_(alpha), masses_(std::move(masses)) {
    if (!(alpha > -1.0) || !std::isfinite(alpha))
        throw DomainError("SobolevProduct requires alpha > -1, got " + std::to_string(alpha));
    for (double m : masses_)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw DomainError("SobolevProduct masses must be finite and nonnegative");
}

double SobolevProduct::mass(int j) const {
    if (j < 0 || j >= static_cast<int>(masses_.size()))
        return 0.0;
    return masses_[idx(j)];
}

std::vector<int> SobolevProduct::positive_indices() const {
    std::vector<int> out;
    for (int j = 0; j < static_cast<int>(masses_.size()); ++j)
        if (masses_[idx(j)] > 0.0)
            out.push_back(j);
    return out;
}

SobolevBasisCache::SobolevBasisCache(SobolevProduct product, std::vector<SobolevBasisEntry> entries)
    : product_(std::move(product)), entries_(std::move(entries)) {}

const SobolevBasisEntry& SobolevBasisCache::entry(int n) const {
    if (n < 0 || n > n_max())
        throw DomainError("degree " + std::to_string(n) + " outside cache range [0, " + std::to_string(n_max()) + "]");
    return entries_[idx(n)];
}

LaguerreExpansion SobolevBasisCache::Q(int n) const {
    const SobolevBasisEntry& e = entry(n);
    const double s = std::sqrt(e.sobolev_norm_sq_Q);
    std::vector<double> c(e.q.coeffs().begin(), e.q.coeffs().end());
    for (double& v : c)
        v *= s;
    return {alpha(), std::move(c)};
}

double sobolev_inner(const LaguerreExpansion& f, const LaguerreExpansion& g, const SobolevProduct& S) {
    if (f.alpha() != S.alpha() || g.alpha() != S.alpha())
        throw DomainError("sobolev_inner: expansions and product must share alpha");
    CompensatedSum acc;
    const std::size_t len = std::min(f.size(), g.size());
    for (std::size_t k = 0; k < len; ++k)
        acc.add(f[k] * g[k]);
    for (int j : S.positive_indices())
        acc.add(S.mass(j) * expansion_deriv_zero(f, j) * expansion_deriv_zero(g, j));
    return acc.value();
}

SobolevBasisCache build_stagewise(const SobolevProduct& S, int n_max) {
    if (n_max < 0)
        throw DomainError("build_stagewise requires n_max >= 0");
    const double alpha = S.alpha();
    const int n_derivs = S.N() + 2; // orders 0..N+1
    const std::size_t count = idx(n_max) + 1;

    // Stage 0: Q_{n,0} = L_n = ||L_n|| l_n.
    std::vector<std::vector<double>> P(count);
    std::vector<double> norm_sq(count);
    std::vector<std::vector<double>> D(count, std::vector<double>(idx(n_derivs)));
    for (int n = 0; n <= n_max; ++n) {
        norm_sq[idx(n)] = norm_sq_L(alpha, n);
        P[idx(n)].assign(idx(n) + 1, 0.0);
        P[idx(n)][idx(n)] = std::sqrt(norm_sq[idx(n)]);
        for (int k = 0; k < n_derivs; ++k)
            D[idx(n)][idx(k)] = deriv_at_zero(alpha, n, k);
    }

    int stage = 0;
    for (int j : S.positive_indices()) {
        ++stage;
        const double M = S.mass(j);
        // Running K_{n-1,s-1}^{(0,j)}(x,0) (as an expansion) and K_{n-1,s-1}^{(k,j)}(0,0).
        std::vector<double> kernel_vec(count, 0.0);
        std::vector<double> kernel_at_zero(idx(n_derivs), 0.0);

        for (int n = 0; n <= n_max; ++n) {
            const std::vector<double>& Pn = P[idx(n)];
            const std::vector<double>& Dn = D[idx(n)];
            const double denom = 1.0 + M * kernel_at_zero[idx(j)];
            const double coef = M * Dn[idx(j)] / denom;
            require_finite(coef, "stage correction coefficient", stage, n);

            std::vector<double> newP = Pn;
            for (int i = 0; i < n; ++i)
                newP[idx(i)] -= coef * kernel_vec[idx(i)];
            const double newNorm = norm_sq[idx(n)] + M * Dn[idx(j)] * Dn[idx(j)] / denom;
            require_finite(newNorm, "stage norm", stage, n);
            std::vector<double> newD(idx(n_derivs));
            for (int k = 0; k < n_derivs; ++k)
                newD[idx(k)] = (k == j) ? Dn[idx(k)] / denom : Dn[idx(k)] - coef * kernel_at_zero[idx(k)];

            // Fold degree n of the previous stage into the running kernels.
            const double w = Dn[idx(j)] / norm_sq[idx(n)];
            for (int i = 0; i <= n; ++i)
                kernel_vec[idx(i)] += w * Pn[idx(i)];
            for (int k = 0; k < n_derivs; ++k)
                kernel_at_zero[idx(k)] += w * Dn[idx(k)];

            P[idx(n)] = std::move(newP);
            norm_sq[idx(n)] = newNorm;
            D[idx(n)] = std::move(newD);
        }
    }

    std::vector<SobolevBasisEntry> entries;
    entries.reserve(count);
    for (int n = 0; n <= n_max; ++n)
        entries.push_back(make_entry(alpha, std::move(P[idx(n)]), norm_sq[idx(n)], D[idx(n)]));
    fill_connection_coeffs(entries);
    return SobolevBasisCache(S, std::move(entries));
}

namespace {

// In-place Cholesky of a small SPD matrix (row-major, lower factor).
void cholesky_solve(std::vector<double> a, std::vector<double>& rhs, int r, int n) {
    for (int c = 0; c < r; ++c) {
        double d = a[idx(c * r + c)];
        for (int k = 0; k < c; ++k)
            d -= a[idx(c * r + k)] * a[idx(c * r + k)];
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericFailure("build_gram_oracle: Sobolev Gram block lost positive definiteness at degree " +
                                 std::to_string(n));
        const double root = std::sqrt(d);
        a[idx(c * r + c)] = root;
        for (int row = c + 1; row < r; ++row) {
            double v = a[idx(row * r + c)];
            for (int k = 0; k < c; ++k)
                v -= a[idx(row * r + k)] * a[idx(c * r + k)];
            a[idx(row * r + c)] = v / root;
        }
    }
    for (int row = 0; row < r; ++row) {
        double v = rhs[idx(row)];
        for (int k = 0; k < row; ++k)
            v -= a[idx(row * r + k)] * rhs[idx(k)];
        rhs[idx(row)] = v / a[idx(row * r + row)];
    }
    for (int row = r - 1; row >= 0; --row) {
        double v = rhs[idx(row)];
        for (int k = row + 1; k < r; ++k)
            v -= a[idx(k * r + row)] * rhs[idx(k)];
        rhs[idx(row)] = v / a[idx(row * r + row)];
    }
}

} // namespace

SobolevBasisCache build_gram_oracle(const SobolevProduct& S, int n_max) {
    if (n_max < 0)
        throw DomainError("build_gram_oracle requires n_max >= 0");
    const double alpha = S.alpha();
    const int n_derivs = S.N() + 2;
    const std::vector<int> J = S.positive_indices();
    const int r = static_cast<int>(J.size());

    // d[k][i] = (l_i)^{(k)}(0) for every order that is needed.
    std::vector<std::vector<double>> d(idx(n_derivs));
    for (int k = 0; k < n_derivs; ++k)
        d[idx(k)] = orthonormal_deriv_column(alpha, n_max, k);

    std::vector<double> sqrt_m(idx(r));
    for (int a = 0; a < r; ++a)
        sqrt_m[idx(a)] = std::sqrt(S.mass(J[idx(a)]));

    // kern[k][a] = sum_{i<n} d_k[i] d_{J_a}[i]; covers the r x r block as k = J_b.
    std::vector<std::vector<double>> kern(idx(n_derivs), std::vector<double>(idx(r), 0.0));

    std::vector<SobolevBasisEntry> entries;
    entries.reserve(idx(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double lead = std::exp(0.5 * log_norm_sq_L(alpha, n)); // ||L_n||
        std::vector<double> coeffs(idx(n) + 1, 0.0);
        coeffs[idx(n)] = lead;
        double norm_sq = lead * lead;
        std::vector<double> derivs(idx(n_derivs));
        for (int k = 0; k < n_derivs; ++k)
            derivs[idx(k)] = lead * d[idx(k)][idx(n)];

        if (r > 0) {
            // (I + S A S) y = S d_J[n] ||L_n||, z = S^{-1} y = Q_n^{(J)}(0).
            std::vector<double> mat(idx(r * r));
            std::vector<double> y(idx(r));
            for (int a = 0; a < r; ++a) {
                for (int b = 0; b < r; ++b)
                    mat[idx(a * r + b)] =
                        (a == b ? 1.0 : 0.0) + sqrt_m[idx(a)] * kern[idx(J[idx(a)])][idx(b)] * sqrt_m[idx(b)];
                y[idx(a)] = sqrt_m[idx(a)] * d[idx(J[idx(a)])][idx(n)] * lead;
            }
            cholesky_solve(std::move(mat), y, r, n);
            std::vector<double> mz(idx(r)); // M_a z_a
            for (int a = 0; a < r; ++a)
                mz[idx(a)] = sqrt_m[idx(a)] * y[idx(a)];

            for (int i = 0; i < n; ++i) {
                CompensatedSum acc;
                for (int a = 0; a < r; ++a)
                    acc.add(-mz[idx(a)] * d[idx(J[idx(a)])][idx(i)]);
                coeffs[idx(i)] = acc.value();
            }
            CompensatedSum nacc;
            nacc.add(norm_sq);
            for (int a = 0; a < r; ++a)
                nacc.add(lead * mz[idx(a)] * d[idx(J[idx(a)])][idx(n)]);
            norm_sq = nacc.value();
            for (int k = 0; k < n_derivs; ++k) {
                CompensatedSum acc;
                acc.add(derivs[idx(k)]);
                for (int a = 0; a < r; ++a)
                    acc.add(-mz[idx(a)] * kern[idx(k)][idx(a)]);
                derivs[idx(k)] = acc.value();
            }
            for (int a = 0; a < r; ++a)
                derivs[idx(J[idx(a)])] = y[idx(a)] / sqrt_m[idx(a)];
            require_finite(norm_sq, "oracle norm", 0, n);

            for (int k = 0; k < n_derivs; ++k)
                for (int a = 0; a < r; ++a)
                    kern[idx(k)][idx(a)] += d[idx(k)][idx(n)] * d[idx(J[idx(a)])][idx(n)];
        }
        entries.push_back(make_entry(alpha, std::move(coeffs), norm_sq, derivs));
    }
    fill_connection_coeffs(entries);
    return SobolevBasisCache(S, std::move(entries));
}

namespace {

std::vector<double> solve_connection(double alpha, int N, int n, const std::vector<double>& q_derivs) {
    const int K = N + 1;
    std::vector<double> b(idx(K) + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        const double log_lk = log_abs_deriv_at_zero(alpha, n, k) - 0.5 * log_norm_sq_L(alpha, n);
        const double lk = ((k % 2 == 0) ? 1.0 : -1.0) * std::exp(log_lk);
        const double ratio = q_derivs[idx(k)] / lk;
        // A_j(k,n) = (l_{n-j}^{alpha+2j})^{(k-j)}(0) / (l_n^alpha)^{(k)}(0); sign (-1)^j.
        auto term_coeff = [&](int j) {
            const double a2 = alpha + 2.0 * j;
            const double log_num = log_abs_deriv_at_zero(a2, n - j, k - j) - 0.5 * log_norm_sq_L(a2, n - j);
            const double log_binom_fact = log_gamma(k + 1.0) - log_gamma(k - j + 1.0); // C(k,j) j!
            const double mag = std::exp(log_num - log_lk + log_binom_fact);
            return (j % 2 == 0) ? mag : -mag;
        };
        CompensatedSum acc;
        acc.add(ratio);
        for (int j = 0; j < k; ++j)
            acc.add(-b[idx(j)] * term_coeff(j));
        b[idx(k)] = acc.value() / term_coeff(k);
    }
    return b;
}

void fill_connection_coeffs(std::vector<SobolevBasisEntry>& entries) {
    if (entries.empty())
        return;
    const double alpha = entries.front().q.alpha();
    const int N = static_cast<int>(entries.front().derivs_at_zero.size()) - 2;
    for (int n = std::max(N + 1, 0); n < static_cast<int>(entries.size()); ++n)
        entries[idx(n)].b = solve_connection(alpha, N, n, entries[idx(n)].derivs_at_zero);
}

} // namespace

std::vector<double> connection_coeffs(const SobolevBasisCache& cache, int n) {
    const int N = cache.product().N();
    if (n < N + 1)
        throw DomainError("connection_coeffs requires n >= N+1");
    return solve_connection(cache.alpha(), N, n, cache.entry(n).derivs_at_zero);
}

double representation_residual(const SobolevBasisCache& cache, int n, std::span<const double> b) {
    const double alpha = cache.alpha();
    const LaguerreExpansion& q = cache.q(n);
    const auto rule = cached_quadrature(alpha, n + 1);
    std::vector<LaguerreExpansion> parts;
    for (int j = 0; j < static_cast<int>(b.size()); ++j)
        parts.push_back(LaguerreExpansion::basis(alpha + 2.0 * j, n - j));
    double max_dev = 0.0;
    double max_val = 0.0;
    for (double x : rule->nodes) {
        const double qv = eval_weighted(q, x);
        CompensatedSum rec;
        for (int j = 0; j < static_cast<int>(b.size()); ++j)
            rec.add(b[idx(j)] * std::pow(x, j) * eval_weighted(parts[idx(j)], x));
        max_dev = std::max(max_dev, std::abs(qv - rec.value()));
        max_val = std::max(max_val, std::abs(qv));
    }
    return max_val > 0.0 ? max_dev / max_val : max_dev;
}

double q_deriv_ratio(const SobolevBasisCache& cache, int k, int n) {
    const int N = cache.product().N();
    if (k < 0 || k > N + 1 || k > n)
        throw DomainError("q_deriv_ratio requires 0 <= k <= N+1 and k <= n");
    return cache.entry(n).derivs_at_zero[idx(k)] / orthonormal_deriv_at_zero(cache.alpha(), n, k);
}

std::string serialize_cache(const SobolevBasisCache& cache) {
    nlohmann::json doc;
    doc["format"] = "lsobolev.sobolev_basis";
    doc["version"] = kSerialVersion;
    doc["alpha"] = cache.alpha();
    doc["masses"] = std::vector<double>(cache.product().masses().begin(), cache.product().masses().end());
    doc["n_max"] = cache.n_max();
    nlohmann::json entries = nlohmann::json::array();
    for (int n = 0; n <= cache.n_max(); ++n) {
        const SobolevBasisEntry& e = cache.entry(n);
        entries.push_back({{"n", n},
                           {"q_coeffs", std::vector<double>(e.q.coeffs().begin(), e.q.coeffs().end())},
                           {"sobolev_norm_sq_Q", e.sobolev_norm_sq_Q},
                           {"derivs_at_zero", e.derivs_at_zero},
                           {"b", e.b}});
    }
    doc["entries"] = std::move(entries);
    return doc.dump(1);
}

SobolevBasisCache deserialize_cache(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("deserialize_cache: malformed JSON: ") + e.what());
    }
    if (doc.value("format", "") != "lsobolev.sobolev_basis")
        throw DomainError("deserialize_cache: not a Sobolev basis document");
    if (doc.value("version", 0) != kSerialVersion)
        throw DomainError("deserialize_cache: unsupported version");
    const double alpha = doc.at("alpha").get<double>();
    SobolevProduct product(alpha, doc.at("masses").get<std::vector<double>>());
    std::vector<SobolevBasisEntry> entries;
    for (const auto& e : doc.at("entries")) {
        entries.push_back({LaguerreExpansion(alpha, e.at("q_coeffs").get<std::vector<double>>()),
                           e.at("sobolev_norm_sq_Q").get<double>(), e.at("derivs_at_zero").get<std::vector<double>>(),
                           e.at("b").get<std::vector<double>>()});
    }
    if (static_cast<int>(entries.size()) != doc.at("n_max").get<int>() + 1)
        throw DomainError("deserialize_cache: entry count does not match n_max");
    return {std::move(product), std::move(entries)};
}

} // namespace lsobolev
