#include "berthstay/mdgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>


namespace berthstay {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double component_mass(const GaussianComponent& c, double lb, double ub) {
    if (c.sigma == 0.0) return (c.mu >= lb && c.mu <= ub) ? 1.0 : 0.0;
    return normal_cdf((ub - c.mu) / c.sigma) - normal_cdf((lb - c.mu) / c.sigma);
}

void require_mass(const TruncatedMixture& mix) {
    const double mass = mix.in_bounds_mass();
    if (!(mass >= kMinInBoundsMass))
        throw DegenerateTruncation("mixture mass inside [" + std::to_string(mix.lb) + ", " + std::to_string(mix.ub) +
                                   "] is " + std::to_string(mass));
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Linear-interpolated quantile of sorted data.
double quantile(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> trimmed_batch(const SampleSource& target, std::size_t s, double lb, double ub) {
    std::vector<double> out;
    out.reserve(s);
    // A source that keeps returning out-of-bounds values would spin forever.
    for (int round = 0; out.size() < s; ++round) {
        if (round > 1000) throw DegenerateTruncation("target source yields almost no samples inside the bounds");
        const auto batch = target(s - out.size());
        if (batch.empty()) throw DomainError("target source returned no samples");
        for (double x : batch)
            if (x >= lb && x <= ub && out.size() < s) out.push_back(x);
    }
    return out;
}

TruncatedMixture initialize(std::span<const double> batch, const FitConfig& cfg) {
    std::vector<double> sorted(batch.begin(), batch.end());
    std::sort(sorted.begin(), sorted.end());
    const double sd = std_of(sorted, mean_of(sorted));
    std::vector<GaussianComponent> comps;
    for (std::size_t i = 1; i <= cfg.n; ++i)
        comps.push_back({quantile(sorted, static_cast<double>(i) / static_cast<double>(cfg.n + 1)),
                         sd / static_cast<double>(cfg.n)});
    return TruncatedMixture::equal_weights(std::move(comps), cfg.lb, cfg.ub);
}

// One hard-assignment EM pass blended half-and-half with the current mixture.
TruncatedMixture refine(const TruncatedMixture& cur, std::span<const double> batch) {
    const std::size_t k = cur.components.size();
    const double sigma_floor = 1e-6 * (cur.ub - cur.lb);
    std::vector<std::vector<double>> clusters(k);
    for (double x : batch) {
        std::size_t best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) {
            if (cur.weights[i] <= 0.0) continue;
            const double sg = std::max(cur.components[i].sigma, sigma_floor);
            const double z = (x - cur.components[i].mu) / sg;
            const double score = std::log(cur.weights[i]) - std::log(sg) - 0.5 * z * z;
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        clusters[best].push_back(x);
    }
    TruncatedMixture next = cur;
    double wsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& c = clusters[i];
        const double frac = static_cast<double>(c.size()) / static_cast<double>(batch.size());
        next.weights[i] = 0.5 * frac + 0.5 * cur.weights[i];
        if (!c.empty()) {
            const double mu = mean_of(c);
            next.components[i].mu = 0.5 * mu + 0.5 * cur.components[i].mu;
            // A singleton cluster has no spread estimate; keep the old sigma.
            if (c.size() >= 2) next.components[i].sigma = 0.5 * std_of(c, mu) + 0.5 * cur.components[i].sigma;
        }
        wsum += next.weights[i];
    }
    for (auto& w : next.weights) w /= wsum;
    return next;
}

}  // namespace

void TruncatedMixture::validate() const {
    if (components.empty()) throw ConfigError("mixture has no components");
    if (weights.size() != components.size()) throw ConfigError("mixture weights and components differ in length");
    if (!(lb < ub)) throw ConfigError("mixture bounds require lb < ub");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw ConfigError("mixture weight is negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("mixture weights sum to " + std::to_string(sum));
    for (const auto& c : components)
        if (!(c.sigma >= 0.0) || !std::isfinite(c.mu)) throw ConfigError("mixture component has invalid parameters");
}

double TruncatedMixture::in_bounds_mass() const {
    double mass = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) mass += weights[i] * component_mass(components[i], lb, ub);
    return mass;
}

TruncatedMixture TruncatedMixture::equal_weights(std::vector<GaussianComponent> components, double lb, double ub) {
    TruncatedMixture m;
    m.weights.assign(components.size(), components.empty() ? 0.0 : 1.0 / static_cast<double>(components.size()));
    m.components = std::move(components);
    m.lb = lb;
    m.ub = ub;
    return m;
}

double ks_critical_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS alpha must lie in (0, 1)");
    return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

double ks_p_value(double d, std::size_t n, std::size_t m) {
    const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
    const double rt = std::sqrt(ne);
    const double lambda = (rt + 0.12 + 0.11 / rt) * d;
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1000; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-8) return std::clamp(2.0 * sum, 0.0, 1.0);
        sign = -sign;
    }
    return 1.0;
}

KsResult ks_two_sample(std::span<const double> s1, std::span<const double> s2, double alpha) {
    if (s1.empty() || s2.empty()) throw DomainError("ks_two_sample needs two non-empty samples");
    std::vector<double> a(s1.begin(), s1.end());
    std::vector<double> b(s2.begin(), s2.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto n = static_cast<std::int64_t>(a.size());
    const auto m = static_cast<std::int64_t>(b.size());
    // Track |i*m - j*n| in integers so D is exact up to one final division.
    std::int64_t i = 0, j = 0, best = 0;
    while (i < n && j < m) {
        const double x = std::min(a[i], b[j]);
        while (i < n && a[i] == x) ++i;
        while (j < m && b[j] == x) ++j;
        best = std::max(best, std::abs(i * m - j * n));
    }
    KsResult r;
    r.d = static_cast<double>(best) / (static_cast<double>(n) * static_cast<double>(m));
    r.d_crit = ks_critical_coefficient(alpha) *
               std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
    r.p = ks_p_value(r.d, a.size(), b.size());
    return r;
}

double draw_mixture(const TruncatedMixture& mix, Rng& rng) {
    std::discrete_distribution<std::size_t> pick(mix.weights.begin(), mix.weights.end());
    std::normal_distribution<double> z(0.0, 1.0);
    for (;;) {
        const auto& c = mix.components[pick(rng)];
        const double x = c.sigma == 0.0 ? c.mu : c.mu + c.sigma * z(rng);
        if (x >= mix.lb && x <= mix.ub) return x;
    }
}

std::vector<double> sample_mixture(const TruncatedMixture& mix, std::size_t count, Rng& rng) {
    mix.validate();
    require_mass(mix);
    std::vector<double> out;
    out.reserve(count);
    std::discrete_distribution<std::size_t> pick(mix.weights.begin(), mix.weights.end());
    std::normal_distribution<double> z(0.0, 1.0);
    while (out.size() < count) {
        const auto& c = mix.components[pick(rng)];
        const double x = c.sigma == 0.0 ? c.mu : c.mu + c.sigma * z(rng);
        if (x >= mix.lb && x <= mix.ub) out.push_back(x);
    }
    return out;
}

double truncated_mean(const TruncatedMixture& mix) {
    mix.validate();
    require_mass(mix);
    // Per component: mass Z = Phi(beta) - Phi(alpha) and first moment
    // mu Z + sigma (phi(alpha) - phi(beta)), all on the standardized bounds.
    auto pdf = [](double z) { return std::isinf(z) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * z * z); };
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < mix.components.size(); ++i) {
        const auto& c = mix.components[i];
        const double w = mix.weights[i];
        if (c.sigma == 0.0) {
            if (c.mu >= mix.lb && c.mu <= mix.ub) {
                num += w * c.mu;
                den += w;
            }
            continue;
        }
        const double alpha = (mix.lb - c.mu) / c.sigma;
        const double beta = (mix.ub - c.mu) / c.sigma;
        // Upper tail form keeps precision when both bounds sit far right.
        const double z = alpha > 0.0 ? normal_cdf(-alpha) - normal_cdf(-beta) : normal_cdf(beta) - normal_cdf(alpha);
        num += w * (c.mu * z + c.sigma * (pdf(alpha) - pdf(beta)));
        den += w * z;
    }
    return std::clamp(num / den, mix.lb, mix.ub);
}

SampleSource mixture_source(TruncatedMixture mix, std::uint64_t seed) {
    mix.validate();
    require_mass(mix);
    return [mix = std::move(mix), rng = make_rng(seed, 0)](std::size_t count) mutable {
        return sample_mixture(mix, count, rng);
    };
}

SampleSource bootstrap_source(std::vector<double> observations, std::uint64_t seed) {
    if (observations.empty()) throw InsufficientData("bootstrap source needs at least one observation");
    return [obs = std::move(observations), rng = make_rng(seed, 1)](std::size_t count) mutable {
        std::uniform_int_distribution<std::size_t> pick(0, obs.size() - 1);
        std::vector<double> out(count);
        for (auto& x : out) x = obs[pick(rng)];
        return out;
    };
}

void FitConfig::validate() const {
    if (n < 1) throw ConfigError("FitConfig.n must be at least 1");
    if (s < 10) throw ConfigError("FitConfig.s must be at least 10");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("FitConfig.alpha must lie in (0, 1)");
    if (max_iter < 1) throw ConfigError("FitConfig.max_iter must be at least 1");
    if (!(lb < ub)) throw ConfigError("FitConfig bounds require lb < ub");
    if (initial) {
        initial->validate();
        if (initial->components.size() != n) throw ConfigError("initial mixture does not have n components");
    }
}

FitResult fit_mdgs(const SampleSource& target, const FitConfig& cfg) {
    cfg.validate();
    Rng rng = make_rng(cfg.rng_seed, 0);
    std::optional<TruncatedMixture> mix;
    if (cfg.initial) {
        mix = *cfg.initial;
        mix->lb = cfg.lb;
        mix->ub = cfg.ub;
    }
    std::optional<FitResult> best;
    for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
        const auto batch = trimmed_batch(target, cfg.s, cfg.lb, cfg.ub);
        if (!mix) mix = initialize(batch, cfg);
        const auto model = sample_mixture(*mix, cfg.s, rng);
        const auto ks = ks_two_sample(batch, model, cfg.alpha);
        if (!best || ks.d < best->ks.d) best = FitResult{*mix, ks, iter};
        if (ks.passes(cfg.alpha)) return {*mix, ks, iter};
        mix = refine(*mix, batch);
    }
    throw FitNotConverged("MDGS did not pass the KS test within " + std::to_string(cfg.max_iter) + " iterations",
                          *best);
}

}  // namespace berthstay
