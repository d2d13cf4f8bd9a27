#include <sparseclust/detect.hpp>
#include <sparseclust/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sparseclust {

void DetectConfig::validate() const
{
    if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("DetectConfig: epsilon must be in (0, 1]");
    if (n < 1 || p < 1) throw std::invalid_argument("DetectConfig: n and p must be >= 1");
    if (s < 1 || s > p) throw std::invalid_argument("DetectConfig: need 1 <= s <= p");
    if (!(threshold_mult >= 0)) throw std::invalid_argument("DetectConfig: threshold_mult must be >= 0");
}

TwoWaySplit split_two(const Dataset& data, double epsilon, std::uint64_t seed, NoiseMode noise)
{
    if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("split_two: epsilon must be in (0, 1]");
    const Index p = data.p();
    const Index n = data.n();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(p, n);
    if (noise == NoiseMode::gaussian) {
        Rng rng(derive_seed(seed, stream::split));
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < p; ++j) E(j, i) = rng.normal();
    }
    const double c1 = std::sqrt(1.0 + 1.0 / (epsilon * epsilon));
    const double c2 = std::sqrt(1.0 + epsilon * epsilon);

    TwoWaySplit out;
    out.x1.X = (data.X + E / epsilon) / c1;
    out.x2.X = (data.X - epsilon * E) / c2;
    if (data.truth) {
        out.x1.truth = GroundTruth{SparseMean(Eigen::VectorXd(data.truth->theta.theta / c1)), data.truth->z};
        out.x2.truth = GroundTruth{SparseMean(Eigen::VectorXd(data.truth->theta.theta / c2)), data.truth->z};
    }
    return out;
}

double top_s_energy(const Eigen::VectorXd& v, Index s)
{
    const Index p = v.size();
    if (s < 1 || s > p) throw std::invalid_argument("top_s_energy: need 1 <= s <= p");
    std::vector<double> sq(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) sq[static_cast<std::size_t>(j)] = v(j) * v(j);
    std::nth_element(sq.begin(), sq.begin() + (s - 1), sq.end(), std::greater<double>());
    double sum = 0.0;
    for (Index j = 0; j < s; ++j) sum += sq[static_cast<std::size_t>(j)];
    return sum;
}

double test_statistic(const Dataset& x1, const Labels& zhat, Index s)
{
    if (zhat.size() != x1.n()) throw std::invalid_argument("test_statistic: label length mismatch");
    if (s < 1 || s > x1.p()) throw std::invalid_argument("test_statistic: need 1 <= s <= p");
    const Eigen::VectorXd v = x1.X * zhat.as_double() / static_cast<double>(x1.n());
    return top_s_energy(v, s);
}

double detection_threshold(const DetectConfig& cfg)
{
    if (cfg.s < 1 || cfg.s > cfg.p) throw std::invalid_argument("detection_threshold: need 1 <= s <= p");
    const auto s = static_cast<double>(cfg.s);
    const auto p = static_cast<double>(cfg.p);
    return cfg.threshold_mult * s * std::log(std::numbers::e * p / s) / static_cast<double>(cfg.n);
}

DetectionOutcome detection_test(const Dataset& data, const Labeler& cluster_fn, const DetectConfig& cfg,
                                std::uint64_t seed)
{
    cfg.validate();
    if (data.n() != cfg.n || data.p() != cfg.p) throw std::invalid_argument("detection_test: dataset shape differs from config");
    const TwoWaySplit split = split_two(data, cfg.epsilon, seed);
    const Labels zhat = cluster_fn(split.x2);
    DetectionOutcome out;
    out.statistic = test_statistic(split.x1, zhat, cfg.s);
    out.threshold = detection_threshold(cfg);
    out.reject = out.statistic > out.threshold;
    return out;
}

ErrorRates error_rates(Index trials, const ModelParams& params, const Labeler& cluster_fn, const DetectConfig& cfg,
                       std::uint64_t seed)
{
    if (trials < 1) throw std::invalid_argument("error_rates: trials must be >= 1");
    params.validate();
    cfg.validate();
    Index false_alarms = 0, misses = 0;
    for (Index t = 0; t < trials; ++t) {
        const auto ut = static_cast<std::uint64_t>(t);
        const Dataset null_data = sample_null(params, derive_seed(seed, ut, 0));
        if (detection_test(null_data, cluster_fn, cfg, derive_seed(seed, ut, 1)).reject) ++false_alarms;

        const std::uint64_t alt_seed = derive_seed(seed, ut, 2);
        const GroundTruth truth = sample_prior(params, alt_seed);
        const Dataset alt = sample_model(params, truth.theta, truth.z, alt_seed);
        if (!detection_test(alt, cluster_fn, cfg, derive_seed(seed, ut, 3)).reject) ++misses;
    }
    ErrorRates r;
    r.trials = trials;
    const auto nt = static_cast<double>(trials);
    r.type_I = static_cast<double>(false_alarms) / nt;
    r.type_II = static_cast<double>(misses) / nt;
    r.se_type_I = std::sqrt(r.type_I * (1 - r.type_I) / nt);
    r.se_type_II = std::sqrt(r.type_II * (1 - r.type_II) / nt);
    r.labeler_signal = params.delta / std::sqrt(1.0 + cfg.epsilon * cfg.epsilon);
    return r;
}

Labeler oracle_labeler()
{
    return [](const Dataset& d) {
        if (!d.truth) throw std::invalid_argument("oracle_labeler: dataset carries no truth");
        return d.truth->z;
    };
}

Labeler random_labeler(std::uint64_t seed)
{
    return [seed](const Dataset& d) { return sample_labels(d.n(), seed); };
}

} // namespace sparseclust
