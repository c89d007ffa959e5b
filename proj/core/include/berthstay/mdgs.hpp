#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "berthstay/error.hpp"
#include "berthstay/random.hpp"

namespace berthstay {

struct GaussianComponent {
    double mu = 0.0;
    double sigma = 0.0;  // 0 is a point mass at mu

    friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

// Gaussian mixture restricted to [lb, ub] by rejection.
struct TruncatedMixture {
    std::vector<GaussianComponent> components;
    std::vector<double> weights;
    double lb = 0.0;
    double ub = 1.0;

    // Throws ConfigError when components are empty, sizes differ, weights are
    // negative or do not sum to 1, a sigma is negative, or lb >= ub.
    void validate() const;

    // Probability that an untruncated draw lands in [lb, ub].
    double in_bounds_mass() const;

    // Equal weights over the given components.
    static TruncatedMixture equal_weights(std::vector<GaussianComponent> components, double lb, double ub);

    friend bool operator==(const TruncatedMixture&, const TruncatedMixture&) = default;
};

struct KsResult {
    double d = 0.0;
    double d_crit = 0.0;
    double p = 1.0;

    bool passes(double alpha = 0.05) const { return d_crit >= d && p >= alpha; }
};

// c(alpha) in d_crit = c(alpha) * sqrt((n+m)/(n*m)); c(0.05) ~ 1.358.
double ks_critical_coefficient(double alpha);

// Asymptotic Kolmogorov tail probability for statistic d with sizes n, m.
double ks_p_value(double d, std::size_t n, std::size_t m);

// Throws DomainError on an empty sample or alpha outside (0, 1).
KsResult ks_two_sample(std::span<const double> s1, std::span<const double> s2, double alpha = 0.05);

// Throws DegenerateTruncation when the in-bounds mass is below this.
inline constexpr double kMinInBoundsMass = 1e-6;

double draw_mixture(const TruncatedMixture& mix, Rng& rng);
std::vector<double> sample_mixture(const TruncatedMixture& mix, std::size_t count, Rng& rng);

// E[X | lb <= X <= ub], closed form per component.
double truncated_mean(const TruncatedMixture& mix);

// Returns a batch of target samples of (at least) the requested size. The
// callable owns whatever state it needs, including its RNG.
using SampleSource = std::function<std::vector<double>(std::size_t)>;

// Draws from mix using make_rng(seed, 0), the same stream fit_mdgs uses for
// its own model samples.
SampleSource mixture_source(TruncatedMixture mix, std::uint64_t seed);

// Bootstrap resampling of historical observations.
SampleSource bootstrap_source(std::vector<double> observations, std::uint64_t seed);

struct FitConfig {
    std::size_t n = 1;  // component count
    std::size_t s = 500;
    double alpha = 0.05;
    std::size_t max_iter = 500;
    std::uint64_t rng_seed = 0;
    double lb = 0.0;
    double ub = 1.0;
    // Starting mixture; when absent components start at the i/(n+1)
    // quantiles of the first target batch with sigma = std/n.
    std::optional<TruncatedMixture> initial;

    void validate() const;
};

struct FitResult {
    TruncatedMixture mixture;
    KsResult ks;
    std::size_t iterations = 0;
};

class FitNotConverged : public Error {
public:
    FitNotConverged(std::string what, FitResult best) : Error(std::move(what)), best_(std::move(best)) {}

    // Lowest-D mixture seen, with its KS result.
    const FitResult& best() const noexcept { return best_; }

private:
    FitResult best_;
};

FitResult fit_mdgs(const SampleSource& target, const FitConfig& cfg);

}  // namespace berthstay
