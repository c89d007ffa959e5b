// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "berthstay/clean.hpp"
#include "berthstay/engine.hpp"
#include "berthstay/eval.hpp"
#include "berthstay/mdgs.hpp"
#include "berthstay/regress.hpp"
#include "berthstay/synth.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace berthstay;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Count-weighted benchmarks.
Outcome weighted_benchmarks() {
    Outcome o;
    const auto t0 = Clock::now();
    const double all = weighted_benchmark({{"A-Discharging", 99 + 41, 20.13},
                                           {"B-Loading", 52 + 49, 15.39},
                                           {"B-Discharging", 19 + 15, 22.52}});
    const double b = weighted_benchmark({{"B-Loading", 101, 15.39}, {"B-Discharging", 34, 22.52}});
    const double elapsed = seconds_since(t0);
    o.require(std::abs(all - 18.68) <= 0.01, fmt("all terminals %.4f", all));
    o.require(std::abs(b - 17.18) <= 0.01, fmt("terminal B %.4f", b));
    o.require(elapsed < 1e-3, fmt("runtime %.6f s", elapsed));
    o.detail = fmt("all=%.4f", all) + fmt(" B=%.4f", b) + fmt(" in %.2e s", elapsed) +
               (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// 2. Accuracy ranges from the published MAE table.
Outcome accuracy_ranges() {
    Outcome o;
    struct Range {
        std::vector<double> maes;
        double benchmark;
        double lo, hi;
    };
    const std::vector<Range> ranges{
        {{0.818936, 0.778537}, 20.13, 95.93, 96.13},
        {{0.698766, 0.806109}, 20.13, 95.98, 96.52},
        {{0.842775, 0.770508}, 20.13, 95.83, 96.17},
        {{0.251066, 0.238986}, 20.13, 98.76, 98.81},
        {{4.945469262, 4.975122609, 5.322180732, 6.536110629}, 17.18, 61.93, 71.19},
        {{2.400476293, 2.440462353, 2.264205844, 3.183254294}, 17.18, 81.49, 86.85},
        {{1.418807102, 1.210069987, 1.380503727, 1.114090448}, 17.18, 91.73, 93.54},
    };
    double worst = 0;
    for (const auto& r : ranges) {
        double lo = 100, hi = 0;
        for (double mae : r.maes) {
            const double acc = accuracy(mae, r.benchmark);
            lo = std::min(lo, acc);
            hi = std::max(hi, acc);
        }
        worst = std::max({worst, std::abs(lo - r.lo), std::abs(hi - r.hi)});
        o.require(std::abs(lo - r.lo) <= 0.10 && std::abs(hi - r.hi) <= 0.10,
                  fmt("range %.2f", r.lo) + fmt("-%.2f", r.hi) + fmt(" got %.3f", lo) + fmt("-%.3f", hi));
    }
    o.detail = fmt("7 ranges, worst endpoint gap %.3f pp", worst) + (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// Errors with exactly the given mean and sample sigma.
std::vector<double> errors_with(double mu, double sigma, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> e(n);
    for (auto& x : e) x = z(rng);
    double m = 0, s = 0;
    for (double x : e) m += x;
    m /= static_cast<double>(n);
    for (double x : e) s += (x - m) * (x - m);
    s = std::sqrt(s / static_cast<double>(n - 1));
    for (auto& x : e) x = mu + sigma * (x - m) / s;
    return e;
}

// 3. MSE identity against the published group statistics.
Outcome mse_identity() {
    Outcome o;
    struct Row {
        const char* group;
        std::size_t n;
        double mu, sigma, mse;
    };
    const Row rows[] = {{"G1", 99, 0.028330514, 1.040935438, 1.073404288},
                        {"G2", 41, 0.206535282, 0.956142992, 0.934568453}};
    for (const auto& r : rows) {
        const double n = static_cast<double>(r.n);
        const double identity = r.mu * r.mu + (n - 1) / n * r.sigma * r.sigma;
        const auto m = compute_metrics(errors_with(r.mu, r.sigma, r.n, r.n));
        o.require(std::abs(identity - r.mse) <= 5e-4, std::string(r.group) + fmt(" identity %.6f", identity));
        o.require(std::abs(m.mse - r.mse) <= 5e-4, std::string(r.group) + fmt(" compute_metrics %.6f", m.mse));
        o.detail += std::string(o.detail.empty() ? "" : ", ") + r.group + fmt(" mse=%.6f", m.mse) +
                    fmt(" (published %.6f)", r.mse);
    }
    return o;
}

// 4. KS statistic against the brute-force sweep.
Outcome ks_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    Rng rng(2024);
    std::uniform_int_distribution<int> size(1, 20), value(0, 9);
    std::normal_distribution<double> z;
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(size(rng)), b(size(rng));
        for (auto& x : a) x = trial % 2 ? z(rng) : value(rng);
        for (auto& x : b) x = trial % 2 ? z(rng) : value(rng);
        mismatches += ks_two_sample(a, b).d != testing::brute_force_ks_d(a, b);
    }
    const std::vector<double> s{1, 2, 3};
    const std::vector<double> t{1.5, 2.5, 3.5};
    const auto same = ks_two_sample(s, s);
    const double third = ks_two_sample(s, t).d;
    const double elapsed = seconds_since(t0);
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(same.d == 0.0 && same.p == 1.0, "identical samples");
    o.require(third == 1.0 / 3.0, fmt("hand case %.17g", third));
    o.require(elapsed < 5.0, fmt("runtime %.2f s", elapsed));
    o.detail = "1000 pairs, " + std::to_string(mismatches) + " mismatches" + fmt(", %.3f s", elapsed) +
               (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// 5. MDGS on every published block mixture.
Outcome mdgs_convergence() {
    Outcome o;
    const auto t0 = Clock::now();
    std::string per_block;
    for (const auto& [kind, target] : reference_block_mixtures()) {
        int converged = 0;
        bool in_bounds = true;
        for (std::uint64_t run = 0; run < 20; ++run) {
            FitConfig cfg;
            cfg.n = target.components.size();
            cfg.s = 500;
            cfg.max_iter = 500;
            cfg.rng_seed = derive_seed(static_cast<std::uint64_t>(kind), run);
            cfg.lb = target.lb;
            cfg.ub = target.ub;
            FitResult fit;
            try {
                fit = fit_mdgs(mixture_source(target, derive_seed(cfg.rng_seed, 1)), cfg);
                converged += fit.ks.passes(cfg.alpha);
            } catch (const FitNotConverged& e) {
                fit = e.best();
            }
            Rng rng = make_rng(cfg.rng_seed, 2);
            for (double x : sample_mixture(fit.mixture, 2000, rng)) in_bounds &= x >= target.lb && x <= target.ub;
        }
        o.require(converged >= 18, std::string(block_name(kind)) + " converged " + std::to_string(converged) + "/20");
        o.require(in_bounds, std::string(block_name(kind)) + " sample outside bounds");
        per_block += std::string(per_block.empty() ? "" : " ") + std::string(block_name(kind)) + "=" +
                     std::to_string(converged) + "/20";
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 60.0, fmt("runtime %.1f s", elapsed));
    o.detail = per_block + fmt(", %.1f s", elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// 6. Regression round trip, exact and noisy.
Outcome regression_round_trip() {
    Outcome o;
    const auto t0 = Clock::now();
    // The operation line used throughout (A, G1, discharging) and the G1 size
    // distribution of the default ground truth.
    const double a = 0.004, b = 1.2;
    const auto sizes = default_ground_truth().sizes.at(CargoGroup::G1);
    auto draw = [&](Rng& rng, std::size_t n, double sigma) {
        std::normal_distribution<double> z;
        std::vector<SizeDuration> pts(n);
        for (auto& p : pts) {
            p.size_mt = sizes.median_mt * std::exp(sizes.log_sigma * z(rng));
            p.hours = a * p.size_mt + b + sigma * z(rng);
        }
        return pts;
    };
    Rng rng(6);
    const auto exact = fit_linear(draw(rng, 200, 0.0));
    const double exact_err = std::max(std::abs(exact.a - a) / a, std::abs(exact.b - b) / b);
    o.require(exact_err <= 1e-9, fmt("zero-noise relative error %.3e", exact_err));
    int both = 0, slope_only = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        Rng trial_rng = make_rng(66, trial);
        const auto m = fit_linear(draw(trial_rng, 200, 0.5));
        const bool a_ok = std::abs(m.a - a) <= 0.02 * a;
        const bool b_ok = std::abs(m.b - b) <= 0.02 * b;
        both += a_ok && b_ok;
        slope_only += a_ok;
    }
    o.require(both >= 95, std::to_string(both) + "/100 noisy trials recover a and b within 2%");
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 5.0, fmt("runtime %.2f s", elapsed));
    o.detail = fmt("zero-noise err %.1e", exact_err) + ", noisy a&b " + std::to_string(both) + "/100 (a alone " +
               std::to_string(slope_only) + "/100)" + fmt(", %.2f s", elapsed) +
               (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

std::vector<StandardRecord> sorted_records(std::vector<StandardRecord> v) {
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
        return std::tie(x.timestamp, x.event, x.arm_id) < std::tie(y.timestamp, y.event, y.arm_id);
    });
    return v;
}

// 7. synth -> inject -> clean -> fit -> evaluate.
Outcome end_to_end() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto truth = default_ground_truth();
    const auto gen = generate_portcalls(truth, 1000, 42);
    const auto inj = inject_errors(gen.portcalls, {0.05, 0.05, 0.05}, 7);
    const auto cleaned = apply_cleaning(inj.portcalls);

    std::map<std::string, const Portcall*> original, kept;
    std::set<std::string> discarded;
    for (const auto& pc : gen.portcalls) original[pc.portcall_id] = &pc;
    for (const auto& pc : cleaned.cleaned) kept[pc.portcall_id] = &pc;
    for (const auto& d : cleaned.discarded) discarded.insert(d.portcall.portcall_id);
    std::size_t handled = 0;
    for (const auto& c : inj.manifest) {
        if (discarded.contains(c.portcall_id)) {
            ++handled;
            continue;
        }
        const auto* pc = kept.at(c.portcall_id);
        handled += sorted_records(pc->records) == sorted_records(original.at(c.portcall_id)->records);
    }
    std::size_t residual = 0;
    for (const auto& pc : cleaned.cleaned) residual += !validate_portcall(pc).empty();
    const double recall = static_cast<double>(handled) / static_cast<double>(inj.manifest.size());
    o.require(recall >= 0.90, fmt("repaired or discarded %.3f", recall));
    o.require(residual == 0, std::to_string(residual) + " residual violations");

    // Alternate portcalls between fitting and evaluation.
    std::vector<Portcall> train, test;
    for (std::size_t i = 0; i < cleaned.cleaned.size(); ++i) (i % 2 ? test : train).push_back(cleaned.cleaned[i]);
    const std::map<std::string, TerminalProfile> profiles{{"A", default_profile_a()}, {"B", default_profile_b()}};
    const auto registry = fit_registry(train, profiles, {.seed = 1, .threads = 4});
    const auto report = evaluate_scenarios(registry, test);

    std::size_t cells = 0, biased = 0;
    for (const auto& c : report.cells) {
        if (!c.metrics || !c.metrics->sigma) continue;
        ++cells;
        const double se = *c.metrics->sigma / std::sqrt(static_cast<double>(c.metrics->n));
        if (std::abs(c.metrics->mean) > 3 * se) {
            ++biased;
            o.require(false, std::string(scenario_name(c.key.scenario)) + "/" + c.key.terminal + "/" +
                                 std::string(shipment_name(c.key.shipment)) + "/" +
                                 std::string(multiplicity_name(c.key.multiplicity)) + fmt(" mean %.3f", c.metrics->mean) +
                                 fmt(" > 3se %.3f", 3 * se));
        }
    }
    std::size_t non_monotone = 0;
    for (const auto& pe : report.portcalls) {
        std::optional<double> previous;
        for (const auto& p : pe.predicted) {
            if (!p) continue;
            if (previous && *p > *previous + 1e-12) ++non_monotone;
            previous = p;
        }
    }
    o.require(non_monotone == 0, std::to_string(non_monotone) + " non-monotone jobs");
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 120.0, fmt("runtime %.1f s", elapsed));
    o.detail = std::to_string(handled) + "/" + std::to_string(inj.manifest.size()) + " corruptions handled (" +
               std::to_string(discarded.size()) + " calls discarded), " + std::to_string(residual) +
               " residual, " + std::to_string(cells - biased) + "/" + std::to_string(cells) + " cells within 3se, " +
               std::to_string(report.portcalls.size()) + " jobs monotone=" + (non_monotone ? "no" : "yes") +
               fmt(", %.2f s", elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// 8. Monte Carlo against expectation for a discharging job with prewash.
Outcome monte_carlo() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto registry = testing::reference_registry();
    const auto job = testing::job("A", ShipmentType::Discharging, {{"150N", 1500}});
    const double expected = predict_berth_stay(registry, job, Scenario::S1).point_hours;
    const auto mc = predict_berth_stay(registry, job, Scenario::S1, {.mc_count = 100000, .seed = 8, .threads = 4});
    const auto& s = *mc.samples;
    double mean = 0, sq = 0;
    for (double x : s) mean += x;
    mean /= static_cast<double>(s.size());
    for (double x : s) sq += (x - mean) * (x - mean);
    const double se = std::sqrt(sq / static_cast<double>(s.size() - 1) / static_cast<double>(s.size()));
    const double elapsed = seconds_since(t0);
    o.require(std::abs(mean - expected) <= 3 * se, fmt("gap %.4f", std::abs(mean - expected)));
    o.require(elapsed < 30.0, fmt("runtime %.1f s", elapsed));
    o.detail = fmt("expectation %.4f h", expected) + fmt(", mc mean %.4f", mean) + fmt(", |gap|/se %.2f", std::abs(mean - expected) / se) +
               fmt(", %.2f s", elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

// 9. Every CLI command, twice, with different thread counts.
Outcome determinism() {
    Outcome o;
    const auto root = fs::temp_directory_path() / "berthstay_acceptance";
    fs::remove_all(root);
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* threads : {"1", "8"}) {
        const auto dir = root / (std::string("t") + threads);
        fs::create_directories(dir / "report");
        auto p = [&](const char* name) { return (dir / name).string(); };
        std::ofstream(p("job.json")) << R"([{"terminal": "A", "shipment": "Discharging",
            "cargoes": [{"cargo": "150N", "size_mt": 1500}]},
            {"terminal": "B", "shipment": "Loading", "mode": "Concurrent",
            "cargoes": [{"cargo": "EHC 50", "size_mt": 600}, {"cargo": "500N", "size_mt": 1200}]}])";
        const std::vector<std::vector<std::string>> commands{
            {"synth", "--seed", "7", "--count", "400", "--out", p("raw.csv"), "--truth", p("truth.json"),
             "--manifest", p("manifest.json"), "--cargo-error-rate", "0.03", "--event-error-rate", "0.03",
             "--timing-error-rate", "0.03"},
            {"standardize", "--input", p("raw.csv"), "--out", p("std.csv"), "--rejections", p("rejected.csv")},
            {"clean", "--input", p("std.csv"), "--out", p("clean.csv"), "--audit", p("audit.csv"), "--discarded",
             p("discarded.csv")},
            {"stats", "--input", p("clean.csv"), "--out", p("stats.csv")},
            {"fit", "--input", p("clean.csv"), "--seed", "11", "--out", p("models.json"), "--report",
             p("fit_report.json")},
            {"predict", "--models", p("models.json"), "--input", p("job.json"), "--out", p("pred_exp.json")},
            {"predict", "--models", p("models.json"), "--input", p("job.json"), "--out", p("pred_mc.json"), "--mode",
             "mc:20000", "--seed", "5"},
            {"evaluate", "--models", p("models.json"), "--data", p("clean.csv"), "--out", p("eval.csv"), "--json",
             p("eval.json"), "--mode", "mc:200", "--seed", "3"},
            {"report", "--models", p("models.json"), "--input", p("clean.csv"), "--out", p("report")},
        };
        for (auto args : commands) {
            if (args.front() != "synth") {
                args.push_back("--threads");
                args.push_back(threads);
            }
            // Inputs must come out of a command untouched.
            const auto before = snapshot(dir);
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            o.require(code == cli::kExitOk, args.front() + " exited " + std::to_string(code) + ": " + err.str());
            const auto after = snapshot(dir);
            for (const auto& [name, content] : before)
                o.require(after.at(name) == content, args.front() + " modified " + name);
        }
        runs.push_back(snapshot(dir));
    }
    std::size_t files = runs[0].size(), differing = 0;
    for (const auto& [name, content] : runs[0]) {
        const auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != content) {
            ++differing;
            o.require(false, name + " differs across thread counts");
        }
    }
    o.require(runs[0].size() == runs[1].size(), "different file sets");
    fs::remove_all(root);
    o.detail = std::to_string(files) + " output files across 9 commands, " + std::to_string(differing) +
               " differ between 1 and 8 threads" + (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"weighted benchmark", weighted_benchmarks},
        {"accuracy ranges", accuracy_ranges},
        {"MSE identity", mse_identity},
        {"KS oracle", ks_oracle},
        {"MDGS convergence", mdgs_convergence},
        {"regression round trip", regression_round_trip},
        {"end-to-end self-consistency", end_to_end},
        {"Monte Carlo consistency", monte_carlo},
        {"CLI determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
