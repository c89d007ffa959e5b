// Invariants of the regression, MDGS, engine and evaluation modules.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "berthstay/engine.hpp"
#include "berthstay/eval.hpp"
#include "berthstay/mdgs.hpp"
#include "berthstay/regress.hpp"
#include "oracles.hpp"

namespace berthstay {
namespace {

std::vector<SizeDuration> noisy_line(Rng& rng, double a, double b, std::size_t n, double sigma) {
    std::uniform_real_distribution<double> size(100.0, 4000.0);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<SizeDuration> pts(n);
    for (auto& p : pts) {
        p.size_mt = size(rng);
        p.hours = a * p.size_mt + b + noise(rng);
    }
    return pts;
}

TEST(RegressProperties, ResidualsAreOrthogonal) {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = noisy_line(rng, 0.004, 1.2, 5 + trial, 0.5);
        const auto m = fit_linear(pts);
        long double sum = 0, sum_x = 0, scale = 0, scale_x = 0;
        for (const auto& p : pts) {
            const long double r = p.hours - (m.a * p.size_mt + m.b);
            sum += r;
            sum_x += r * p.size_mt;
            scale += std::abs(p.hours);
            scale_x += std::abs(p.hours * p.size_mt);
        }
        EXPECT_LE(std::abs(static_cast<double>(sum)), 1e-9 * static_cast<double>(scale));
        EXPECT_LE(std::abs(static_cast<double>(sum_x)), 1e-9 * static_cast<double>(scale_x));
    }
}

TEST(RegressProperties, ScalingDurationsScalesCoefficients) {
    Rng rng(2);
    for (double c : {0.5, 2.0, 4.0, 0.25}) {
        auto pts = noisy_line(rng, 0.003, 2.0, 50, 0.3);
        const auto m = fit_linear(pts);
        for (auto& p : pts) p.hours *= c;
        const auto scaled = fit_linear(pts);
        // Powers of two keep every floating-point step exact.
        EXPECT_EQ(scaled.a, c * m.a);
        EXPECT_EQ(scaled.b, c * m.b);
    }
}

TEST(RegressProperties, ZeroNoiseRoundTrip) {
    Rng rng(3);
    std::uniform_real_distribution<double> av(0.001, 0.01), bv(0.5, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = av(rng), b = bv(rng);
        const auto m = fit_linear(noisy_line(rng, a, b, 20, 0.0));
        EXPECT_NEAR(m.a, a, 1e-9 * a);
        EXPECT_NEAR(m.b, b, 1e-9 * b);
    }
}

TEST(MdgsProperties, KsIsSymmetricAndMatchesBruteForce) {
    Rng rng(4);
    std::uniform_int_distribution<int> size(1, 20), value(0, 9);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(size(rng)), b(size(rng));
        const bool ties = trial % 2 == 0;
        for (auto& x : a) x = ties ? value(rng) : z(rng);
        for (auto& x : b) x = ties ? value(rng) : z(rng);
        const auto ab = ks_two_sample(a, b);
        EXPECT_EQ(ab.d, ks_two_sample(b, a).d);
        EXPECT_EQ(ab.d, testing::brute_force_ks_d(a, b));
    }
}

TEST(MdgsProperties, SamplingIsDeterministicPerSeed) {
    for (const auto& [kind, mix] : reference_block_mixtures()) {
        Rng r1(derive_seed(10, static_cast<std::uint64_t>(kind)));
        Rng r2(derive_seed(10, static_cast<std::uint64_t>(kind)));
        EXPECT_EQ(sample_mixture(mix, 500, r1), sample_mixture(mix, 500, r2));
    }
}

TEST(MdgsProperties, TruncatedMeanWithinBounds) {
    Rng rng(6);
    std::uniform_real_distribution<double> mu(-3, 6), sigma(0.01, 3), w(0.1, 1);
    std::uniform_int_distribution<int> k(1, 4);
    for (int trial = 0; trial < 500; ++trial) {
        TruncatedMixture mix;
        const int n = k(rng);
        double total = 0;
        for (int i = 0; i < n; ++i) {
            mix.components.push_back({mu(rng), sigma(rng)});
            mix.weights.push_back(w(rng));
            total += mix.weights.back();
        }
        for (auto& x : mix.weights) x /= total;
        mix.lb = mu(rng);
        mix.ub = mix.lb + 0.05 + std::abs(mu(rng));
        if (mix.in_bounds_mass() < kMinInBoundsMass) continue;
        const double m = truncated_mean(mix);
        EXPECT_GE(m, mix.lb);
        EXPECT_LE(m, mix.ub);
    }
}

// A successful fit should keep passing its own KS predicate when re-tested
// against fresh draws at the same s: at least 18 of 20 re-tests per fit.
void expect_retests_pass(const std::string& name, const TruncatedMixture& target, std::uint64_t seed) {
    FitConfig cfg;
    cfg.n = target.components.size();
    cfg.rng_seed = seed;
    cfg.lb = target.lb;
    cfg.ub = target.ub;
    const auto fit = fit_mdgs(mixture_source(target, derive_seed(seed, 1)), cfg);
    int passed = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        Rng model_rng = make_rng(seed, 100 + r);
        Rng target_rng = make_rng(seed, 200 + r);
        const auto model = sample_mixture(fit.mixture, cfg.s, model_rng);
        const auto fresh = sample_mixture(target, cfg.s, target_rng);
        passed += ks_two_sample(model, fresh, cfg.alpha).passes(cfg.alpha);
    }
    EXPECT_GE(passed, 18) << name << " seed " << seed;
}

TEST(MdgsProperties, RetestSingleGaussian) {
    const auto target = TruncatedMixture::equal_weights({{1.0, 0.1}}, 0.5, 1.5);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) expect_retests_pass("N(1, 0.1)", target, seed);
}

TEST(MdgsProperties, RetestBlockMixtures) {
    for (const auto& [kind, target] : reference_block_mixtures())
        for (std::uint64_t seed = 1; seed <= 5; ++seed) expect_retests_pass(std::string(block_name(kind)), target, seed);
}

TEST(EngineProperties, ChainsNestAsSuffixes) {
    const auto a = default_profile_a();
    const auto b = default_profile_b();
    for (auto shipment : {ShipmentType::Loading, ShipmentType::Discharging})
        for (auto mode : {OperationMode::Single, OperationMode::Sequential, OperationMode::Concurrent})
            for (bool shifting : {false, true})
                for (const auto* profile : {&a, &b})
                    for (const char* grade : {"150N", "EHC 50", "NAPHTHA"}) {
                        std::vector<std::pair<std::string, double>> cargoes{{grade, 1000}};
                        if (mode != OperationMode::Single) cargoes.push_back({"600N", 800});
                        const auto job = testing::job(profile->name, shipment, cargoes, mode, shifting);
                        std::vector<std::vector<ChainElement>> chains;
                        for (auto s : all_scenarios()) {
                            try {
                                chains.push_back(build_chain(job, *profile, s).elements);
                            } catch (const NotApplicable&) {
                                EXPECT_EQ(s, Scenario::S2);
                            }
                        }
                        for (std::size_t i = 1; i < chains.size(); ++i) {
                            const auto& outer = chains[i - 1];
                            const auto& inner = chains[i];
                            ASSERT_LE(inner.size(), outer.size());
                            EXPECT_TRUE(std::equal(inner.begin(), inner.end(), outer.end() - inner.size()));
                        }
                        const auto reg = testing::reference_registry();
                        double previous = std::numeric_limits<double>::infinity();
                        for (auto s : all_scenarios()) {
                            try {
                                const double h = predict_berth_stay(reg, job, s).point_hours;
                                EXPECT_LE(h, previous);
                                previous = h;
                            } catch (const NotApplicable&) {
                            }
                        }
                    }
}

TEST(EngineProperties, MonteCarloRespectsBounds) {
    const auto reg = testing::reference_registry();
    const auto job = testing::job("A", ShipmentType::Discharging, {{"150N", 1500}});
    const auto p = predict_berth_stay(reg, job, Scenario::S1, {.mc_count = 5000, .seed = 3, .threads = 2});
    double lb_sum = 0;
    for (auto k : build_chain(job, reg.profile("A"), Scenario::S1).blocks())
        if (const auto* m = std::get_if<MixtureApproach>(&reg.block("A", k).approach)) lb_sum += m->mixture.lb;
    for (double total : *p.samples) EXPECT_GE(total, lb_sum);
    for (const auto& [kind, mix] : reference_block_mixtures()) {
        Rng rng(static_cast<std::uint64_t>(kind));
        for (int i = 0; i < 2000; ++i) {
            const double x = block_sample(BlockModel{kind, MixtureApproach{mix}}, job, reg, rng);
            EXPECT_GE(x, mix.lb);
            EXPECT_LE(x, mix.ub);
        }
    }
}

TEST(EngineProperties, MonteCarloMeanConvergesToExpectation) {
    const auto reg = testing::reference_registry();
    for (const auto& job : {testing::job("A", ShipmentType::Discharging, {{"150N", 1500}}),
                            testing::job("A", ShipmentType::Loading, {{"EHC 50", 600}, {"500N", 900}},
                                         OperationMode::Concurrent, true)}) {
        const double expected = predict_berth_stay(reg, job, Scenario::S1).point_hours;
        const auto mc = predict_berth_stay(reg, job, Scenario::S1, {.mc_count = 100000, .seed = 8, .threads = 4});
        const auto& s = *mc.samples;
        double mean = 0, sq = 0;
        for (double x : s) mean += x;
        mean /= static_cast<double>(s.size());
        for (double x : s) sq += (x - mean) * (x - mean);
        const double se = std::sqrt(sq / static_cast<double>(s.size() - 1)) / std::sqrt(static_cast<double>(s.size()));
        EXPECT_LE(std::abs(mean - expected), 3 * se);
    }
}

TEST(EvalProperties, MseIdentity) {
    Rng rng(9);
    std::normal_distribution<double> z(0.3, 1.7);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> e(2 + trial % 50);
        for (auto& x : e) x = z(rng);
        const auto m = compute_metrics(e);
        const double n = static_cast<double>(m.n);
        const double identity = m.mean * m.mean + (n - 1) / n * *m.sigma * *m.sigma;
        EXPECT_NEAR(m.mse, identity, 1e-9 * m.mse);
    }
}

TEST(EvalProperties, WithinBandMonotone) {
    Rng rng(10);
    std::normal_distribution<double> z(0, 2);
    std::vector<double> e(200);
    for (auto& x : e) x = z(rng);
    double previous = 0;
    for (double h = 0.01; h < 10; h += 0.01) {
        const double f = within_band(e, h);
        EXPECT_GE(f, previous);
        previous = f;
    }
}

TEST(EvalProperties, AccuracyStrictlyDecreasing) {
    for (double bench : {15.39, 17.18, 20.13})
        for (double mae = 0; mae + 0.01 < bench; mae += 0.01) EXPECT_GT(accuracy(mae, bench), accuracy(mae + 0.01, bench));
}

}  // namespace
}  // namespace berthstay
