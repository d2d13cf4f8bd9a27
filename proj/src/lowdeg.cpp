#include <sparseclust/errors.hpp>
#include <sparseclust/lowdeg.hpp>
#include <sparseclust/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparseclust {

namespace {

double log_choose(Index n, Index k)
{
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

// C(n, k) by the multiplicative formula; every partial product is itself a
// binomial coefficient, so the result is exact while it fits in 64 bits.
long double choose(Index n, Index k)
{
    k = std::min(k, n - k);
    long double c = 1;
    for (Index i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return c;
}

// Calls f(subset) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(Index n, Index k, F&& f)
{
    std::vector<Index> idx(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        f(idx);
        Index i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

} // namespace

void LowDegParams::validate() const
{
    if (n < 1 || p < 1) throw std::invalid_argument("LowDegParams: n and p must be >= 1");
    if (s < 1 || s > p) throw std::invalid_argument("LowDegParams: need 1 <= s <= p");
    if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("LowDegParams: delta must be >= 0");
    if (D < 0) throw std::invalid_argument("LowDegParams: D must be >= 0");
    if (!(shrink >= 0 && shrink < 1)) throw std::invalid_argument("LowDegParams: shrink must be in [0, 1)");
}

ModelParams LowDegParams::model() const
{
    ModelParams mp;
    mp.n = n;
    mp.p = p;
    mp.s = s;
    mp.delta = effective_delta();
    return mp;
}

std::string_view to_string(NormMethod m)
{
    switch (m) {
    case NormMethod::exact: return "exact";
    case NormMethod::monte_carlo: return "monte_carlo";
    case NormMethod::bound: return "bound";
    }
    return "unknown";
}

double overlap_moment_exact(Index p, Index s, int d)
{
    if (p < 1 || s < 0 || s > p) throw std::invalid_argument("overlap_moment_exact: need 0 <= s <= p, p >= 1");
    if (d < 0) throw std::invalid_argument("overlap_moment_exact: d must be >= 0");
    const bool exact_counts = log_choose(p, s) < 60.0;
    const double log_total = log_choose(p, s);
    const long double total = exact_counts ? choose(p, s) : 0.0L;
    long double acc = 0;
    for (Index j = std::max<Index>(0, 2 * s - p); j <= s; ++j) {
        const long double w = exact_counts ? choose(s, j) * choose(p - s, s - j) / total
                                           : std::exp(static_cast<long double>(log_choose(s, j) + log_choose(p - s, s - j) - log_total));
        acc += w * std::pow(static_cast<long double>(j), d);
    }
    return static_cast<double>(acc);
}

double truncated_exp(double x, int D)
{
    if (D < 0) throw std::invalid_argument("truncated_exp: D must be >= 0");
    if (!std::isfinite(x)) throw NumericalError("truncated_exp: non-finite argument");
    if (x == 0.0) return 1.0;
    const long double log_abs = std::log(std::abs(static_cast<long double>(x)));
    const long double log_max = std::log(static_cast<long double>(std::numeric_limits<double>::max()));
    long double acc = 1;
    long double log_fact = 0;
    for (int d = 1; d <= D; ++d) {
        log_fact += std::log(static_cast<long double>(d));
        const long double log_term = d * log_abs - log_fact;
        if (log_term > log_max) throw NumericalError("truncated_exp: term of degree " + std::to_string(d) + " overflows");
        const long double term = std::exp(log_term);
        acc += (x < 0 && d % 2 == 1) ? -term : term;
    }
    if (!std::isfinite(static_cast<double>(acc))) throw NumericalError("truncated_exp: sum overflows");
    return static_cast<double>(acc);
}

NormEstimate lowdeg_norm_mc(const LowDegParams& params, Index reps, std::uint64_t seed)
{
    params.validate();
    if (reps < 2) throw std::invalid_argument("lowdeg_norm_mc: reps must be >= 2");
    const ModelParams mp = params.model();

    // Welford accumulation over per-pair summands.
    long double mean = 0, m2 = 0;
    for (Index r = 0; r < reps; ++r) {
        const auto ur = static_cast<std::uint64_t>(r);
        const GroundTruth a = sample_prior(mp, derive_seed(seed, ur, 0));
        const GroundTruth b = sample_prior(mp, derive_seed(seed, ur, 1));
        const double zz = static_cast<double>(a.z.values().dot(b.z.values()));
        const double tt = a.theta.theta.dot(b.theta.theta);
        const long double x = truncated_exp(zz * tt, params.D);
        const long double dx = x - mean;
        mean += dx / static_cast<long double>(r + 1);
        m2 += dx * (x - mean);
    }
    NormEstimate est;
    est.method = NormMethod::monte_carlo;
    est.value = static_cast<double>(mean);
    const long double var = m2 / static_cast<long double>(reps - 1);
    est.std_error = static_cast<double>(std::sqrt(var / static_cast<long double>(reps)));
    return est;
}

PriorDraw canonical_draw(const LowDegParams& params)
{
    PriorDraw d;
    d.z = Eigen::VectorXi::Ones(params.n);
    for (Index j = 0; j < params.s; ++j) d.support.push_back(j);
    d.signs = Eigen::VectorXi::Ones(params.s);
    return d;
}

NormEstimate lowdeg_norm_exact(const LowDegParams& params) { return lowdeg_norm_exact(params, canonical_draw(params)); }

NormEstimate lowdeg_norm_exact(const LowDegParams& params, const PriorDraw& first)
{
    params.validate();
    const Index n = params.n, p = params.p, s = params.s;
    const double log_states = (static_cast<double>(n) + static_cast<double>(s)) * std::log(2.0) + log_choose(p, s);
    if (log_states > std::log(kMaxEnumerationStates) + 1e-9)
        throw std::invalid_argument("lowdeg_norm_exact: instance too large for enumeration (2^n C(p,s) 2^s > 1e7)");
    if (first.z.size() != n || static_cast<Index>(first.support.size()) != s || first.signs.size() != s)
        throw std::invalid_argument("lowdeg_norm_exact: first draw has wrong shape");

    // Signed sign-vector of the first draw on {0..p-1} (0 off its support).
    Eigen::VectorXi first_sign = Eigen::VectorXi::Zero(p);
    for (Index k = 0; k < s; ++k) {
        const Index j = first.support[static_cast<std::size_t>(k)];
        if (j < 0 || j >= p || first_sign(j) != 0) throw std::invalid_argument("lowdeg_norm_exact: bad first support");
        first_sign(j) = first.signs(k);
    }

    // <z, z~> over all 2^n second label vectors, grouped by value.
    std::map<Index, std::uint64_t> z_counts;
    const std::uint64_t z_total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < z_total; ++mask) {
        Index dot = 0;
        for (Index i = 0; i < n; ++i) dot += first.z(i) * (((mask >> i) & 1U) ? 1 : -1);
        ++z_counts[dot];
    }

    // <theta, theta~> = (delta^2 / s) * k with k the signed overlap; group by k
    // over all C(p,s) supports and 2^s sign patterns.
    std::map<Index, std::uint64_t> k_counts;
    std::uint64_t theta_total = 0;
    const std::uint64_t sign_total = std::uint64_t{1} << s;
    for_each_subset(p, s, [&](const std::vector<Index>& sub) {
        for (std::uint64_t mask = 0; mask < sign_total; ++mask) {
            Index k = 0;
            for (Index r = 0; r < s; ++r) {
                const int sg = ((mask >> r) & 1U) ? 1 : -1;
                k += first_sign(sub[static_cast<std::size_t>(r)]) * sg;
            }
            ++k_counts[k];
            ++theta_total;
        }
    });

    const double delta = params.effective_delta();
    const double unit = delta * delta / static_cast<double>(s);
    long double acc = 0;
    for (const auto& [a, ca] : z_counts) {
        for (const auto& [k, ck] : k_counts) {
            const long double w = static_cast<long double>(ca) / static_cast<long double>(z_total) *
                                  static_cast<long double>(ck) / static_cast<long double>(theta_total);
            acc += w * truncated_exp(static_cast<double>(a) * static_cast<double>(k) * unit, params.D);
        }
    }
    NormEstimate est;
    est.method = NormMethod::exact;
    est.value = static_cast<double>(acc);
    est.std_error = 0.0;
    return est;
}

double lowdeg_ratio(const LowDegParams& params)
{
    params.validate();
    const double d4 = std::pow(params.effective_delta(), 4);
    const auto n = static_cast<double>(params.n);
    const auto p = static_cast<double>(params.p);
    const auto s = static_cast<double>(params.s);
    return std::sqrt(n * d4 / p) + std::sqrt(4.0 * n * d4 * params.D / (s * s));
}

double lowdeg_bound(const LowDegParams& params)
{
    const double r = lowdeg_ratio(params);
    if (!(r < 1.0))
        throw OutsideRegime("lowdeg_bound: r = " + std::to_string(r) + " >= 1, the geometric bound does not apply");
    const double r2 = r * r;
    double sum = 0.0, term = 1.0;
    for (int d = 1; d <= params.D / 2; ++d) {
        term *= r2;
        sum += term;
    }
    return 1.0 + sum;
}

TestOutcome randomized_test(double f_value, std::uint64_t seed)
{
    if (!std::isfinite(f_value)) throw std::invalid_argument("randomized_test: non-finite f");
    if (f_value < 0.0 || f_value > 1.0) return TestOutcome::undefined;
    Rng rng(derive_seed(seed, stream::bernoulli));
    return rng.uniform() < f_value ? TestOutcome::one : TestOutcome::zero;
}

} // namespace sparseclust
