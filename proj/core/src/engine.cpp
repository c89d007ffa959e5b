#include "berthstay/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "berthstay/error.hpp"
#include "parallel.hpp"

namespace berthstay {
namespace {

bool is_gap_block(BlockKind k) {
    return k == BlockKind::CargoArmConnection || k == BlockKind::CargoArmDisconnection ||
           k == BlockKind::PrewashArmConnection || k == BlockKind::PrewashArmDisconnection;
}

std::optional<Timestamp> first_of(const Portcall& pc, EventKind kind) {
    for (const auto& r : pc.records)
        if (r.event == kind) return r.timestamp;
    return std::nullopt;
}

std::optional<Timestamp> last_of(const Portcall& pc, EventKind kind) {
    std::optional<Timestamp> out;
    for (const auto& r : pc.records)
        if (r.event == kind && (!out || *out < r.timestamp)) out = r.timestamp;
    return out;
}

std::optional<Timestamp> block_start(const Portcall& pc, BlockKind k) {
    switch (k) {
        case BlockKind::Sampling: return first_of(pc, EventKind::CommenceSampling);
        case BlockKind::TankInspection: return first_of(pc, EventKind::CommenceTankInspection);
        case BlockKind::SafetyMeeting: return first_of(pc, EventKind::CommenceSafetyMeeting);
        case BlockKind::UBO: return first_of(pc, EventKind::CommenceUllageBeforeOperation);
        case BlockKind::CargoOperation: return first_of(pc, EventKind::CommenceOperation);
        case BlockKind::Shifting: return first_of(pc, EventKind::CommenceShifting);
        case BlockKind::Prewash: return first_of(pc, EventKind::CommencePrewash);
        case BlockKind::Stripping: return first_of(pc, EventKind::CommenceStrippingToShore);
        default: return std::nullopt;
    }
}

std::optional<Timestamp> block_end(const Portcall& pc, BlockKind k) {
    switch (k) {
        case BlockKind::Sampling: return first_of(pc, EventKind::SamplePass);
        case BlockKind::TankInspection: return first_of(pc, EventKind::CompleteTankInspection);
        case BlockKind::SafetyMeeting: return first_of(pc, EventKind::CompleteSafetyMeeting);
        case BlockKind::UBO: return first_of(pc, EventKind::CompleteUllageBeforeOperation);
        case BlockKind::CargoArmConnection: return last_of(pc, EventKind::CargoArmConnected);
        case BlockKind::CargoOperation: return last_of(pc, EventKind::CompleteOperation);
        case BlockKind::CargoArmDisconnection: return last_of(pc, EventKind::CargoArmDisconnected);
        case BlockKind::Shifting: return first_of(pc, EventKind::CompleteShifting);
        case BlockKind::PrewashArmConnection: return first_of(pc, EventKind::MarpolPrewashArmConnected);
        case BlockKind::Prewash: return first_of(pc, EventKind::CompletePrewash);
        case BlockKind::Stripping: return first_of(pc, EventKind::CompleteStrippingToShore);
        case BlockKind::PrewashArmDisconnection: return first_of(pc, EventKind::MarpolPrewashArmDisconnected);
    }
    return std::nullopt;
}

std::optional<Timestamp> element_end(const Portcall& pc, const ChainElement& e) {
    std::optional<Timestamp> out;
    for (auto k : e.members) {
        auto t = block_end(pc, k);
        if (!t) return std::nullopt;
        if (!out || *out < *t) out = t;
    }
    return out;
}

std::size_t cargo_count(const JobSpec& job) { return job.cargoes.size(); }

double regression_hours(const JobSpec& job, const ModelRegistry& registry) {
    std::vector<double> durations;
    durations.reserve(job.cargoes.size());
    for (const auto& c : job.cargoes) {
        const RegressionKey key{job.terminal, c.cargo.group, job.shipment};
        auto it = registry.catalog.find(key);
        if (it == registry.catalog.end()) throw ModelUnavailable("no regression model for " + to_string(key));
        durations.push_back(predict_duration(it->second, c.size_mt, registry.duration_floor));
    }
    return aggregate_cargo_ops(durations, job.mode);
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

const std::array<Scenario, 4>& all_scenarios() {
    static constexpr std::array<Scenario, 4> kAll{Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4};
    return kAll;
}

std::string_view scenario_name(Scenario s) {
    switch (s) {
        case Scenario::S1: return "S1";
        case Scenario::S2: return "S2";
        case Scenario::S3: return "S3";
        case Scenario::S4: return "S4";
    }
    return "S1";
}

std::optional<Scenario> scenario_from_name(std::string_view name) {
    for (auto s : all_scenarios()) {
        const auto n = scenario_name(s);
        if (name == n || name == n.substr(1) || (name.size() == 2 && name[0] == 's' && name.substr(1) == n.substr(1)))
            return s;
    }
    return std::nullopt;
}

TerminalProfile default_profile_a() {
    TerminalProfile p;
    p.name = "A";
    for (auto k : all_block_kinds()) p.observed_blocks.insert(k);
    p.supports_sampling = true;
    p.records_surveyor = true;
    p.prewash_policy = {{CargoGroup::G1, true}, {CargoGroup::G2, false}, {CargoGroup::Other, false}};
    return p;
}

TerminalProfile default_profile_b() {
    TerminalProfile p;
    p.name = "B";
    p.observed_blocks = {BlockKind::CargoOperation, BlockKind::CargoArmDisconnection};
    p.supports_sampling = false;
    p.records_surveyor = false;
    p.prewash_policy = {{CargoGroup::G1, false}, {CargoGroup::G2, false}, {CargoGroup::Other, false}};
    return p;
}

void JobSpec::validate() const {
    if (cargoes.empty()) throw DomainError("job has no cargoes");
    for (const auto& c : cargoes)
        if (!(c.size_mt >= 0.0)) throw DomainError("job cargo size must be non-negative");
    if ((mode == OperationMode::Single) != (cargoes.size() == 1))
        throw DomainError("operation mode Single requires exactly one cargo");
}

bool JobSpec::requires_prewash() const {
    return std::any_of(cargoes.begin(), cargoes.end(), [&](const JobCargo& c) {
        return berthstay::requires_prewash(c.cargo.group, shipment, prewash_policy);
    });
}

std::vector<BlockKind> ChainPlan::blocks() const {
    std::vector<BlockKind> out;
    for (const auto& e : elements) out.insert(out.end(), e.members.begin(), e.members.end());
    return out;
}

ChainPlan build_chain(const JobSpec& job, const TerminalProfile& profile, Scenario scenario) {
    job.validate();
    const bool discharging = job.shipment == ShipmentType::Discharging;
    const bool sampling = discharging && profile.supports_sampling && profile.observed_blocks.contains(BlockKind::Sampling);
    if (scenario == Scenario::S2 && !sampling)
        throw NotApplicable(std::string("scenario S2 needs sampling events, which ") +
                            (discharging ? "terminal " + profile.name + " does not record" : "loading jobs lack"));

    std::vector<ChainElement> full;
    auto add = [&](std::vector<BlockKind> members) {
        std::erase_if(members, [&](BlockKind k) {
            return k != BlockKind::CargoOperation && !profile.observed_blocks.contains(k);
        });
        if (!members.empty()) full.push_back({std::move(members)});
    };
    const bool ti_early = profile.tank_inspection == TankInspectionPosition::AfterSafetyMeeting;
    if (sampling) add({BlockKind::Sampling});
    add({BlockKind::SafetyMeeting});
    if (ti_early) add({BlockKind::TankInspection});
    add({BlockKind::UBO});
    add({BlockKind::CargoArmConnection});
    if (job.needs_shifting) add({BlockKind::Shifting});
    add({BlockKind::CargoOperation});
    if (!ti_early) add({BlockKind::TankInspection});
    add({BlockKind::CargoArmDisconnection});
    if (discharging && job.requires_prewash()) {
        add({BlockKind::PrewashArmConnection});
        add({BlockKind::Prewash, BlockKind::Stripping});
        add({BlockKind::PrewashArmDisconnection});
    }

    auto position = [&](BlockKind k) {
        return static_cast<std::size_t>(
            std::find_if(full.begin(), full.end(),
                         [&](const ChainElement& e) { return e.members.front() == k; }) -
            full.begin());
    };
    std::size_t from = 0;
    switch (scenario) {
        case Scenario::S1: from = 0; break;
        case Scenario::S2: from = position(BlockKind::Sampling) + 1; break;
        case Scenario::S3: from = position(BlockKind::CargoOperation); break;
        case Scenario::S4: from = position(BlockKind::CargoOperation) + 1; break;
    }
    ChainPlan plan;
    plan.scenario = scenario;
    plan.elements.assign(full.begin() + static_cast<std::ptrdiff_t>(from), full.end());
    return plan;
}

double aggregate_cargo_ops(std::span<const double> durations, OperationMode mode) {
    if (durations.empty()) throw DomainError("aggregate_cargo_ops needs at least one duration");
    if (mode == OperationMode::Concurrent) return *std::max_element(durations.begin(), durations.end());
    return std::accumulate(durations.begin(), durations.end(), 0.0);
}

const TerminalProfile& ModelRegistry::profile(const std::string& terminal) const {
    auto it = profiles.find(terminal);
    if (it == profiles.end()) throw ModelUnavailable("no terminal profile for '" + terminal + "'");
    return it->second;
}

const BlockModel& ModelRegistry::block(const std::string& terminal, BlockKind kind) const {
    auto it = blocks.find({terminal, kind});
    if (it == blocks.end())
        throw ModelUnavailable("no model for block " + std::string(block_name(kind)) + " at terminal '" + terminal + "'");
    return it->second;
}

double block_expectation(const BlockModel& model, const JobSpec& job, const ModelRegistry& registry) {
    return std::visit(
        [&](const auto& a) -> double {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, FixedApproach>) return a.hours;
            else if constexpr (std::is_same_v<A, ProportionalApproach>)
                return static_cast<double>(cargo_count(job)) * a.unit_hours;
            else if constexpr (std::is_same_v<A, MixtureApproach>) return truncated_mean(a.mixture);
            else return regression_hours(job, registry);
        },
        model.approach);
}

double block_sample(const BlockModel& model, const JobSpec& job, const ModelRegistry& registry, Rng& rng) {
    if (const auto* m = std::get_if<MixtureApproach>(&model.approach)) return draw_mixture(m->mixture, rng);
    return block_expectation(model, job, registry);
}

std::optional<double> Prediction::quantile(double q) const {
    if (!samples || samples->empty()) return std::nullopt;
    std::vector<double> sorted = *samples;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(n)));
    return sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
}

Prediction predict_berth_stay(const ModelRegistry& registry, const JobSpec& job, Scenario scenario,
                              const PredictOptions& options) {
    const auto plan = build_chain(job, registry.profile(job.terminal), scenario);
    std::vector<std::vector<const BlockModel*>> models;
    for (const auto& e : plan.elements) {
        auto& row = models.emplace_back();
        for (auto k : e.members) {
            const auto& m = registry.block(job.terminal, k);
            if (const auto* mix = std::get_if<MixtureApproach>(&m.approach)) {
                mix->mixture.validate();
                if (mix->mixture.in_bounds_mass() < kMinInBoundsMass)
                    throw DegenerateTruncation("mixture for block " + std::string(block_name(k)) +
                                               " has no mass inside its bounds");
            }
            row.push_back(&m);
        }
    }

    Prediction p;
    p.scenario = scenario;
    const std::size_t elements = plan.elements.size();
    if (options.mc_count == 0) {
        for (std::size_t e = 0; e < elements; ++e) {
            double v = 0.0;
            for (const auto* m : models[e]) v = std::max(v, block_expectation(*m, job, registry));
            p.per_block.push_back({plan.elements[e].members, v});
        }
    } else {
        const std::size_t n = options.mc_count;
        // Deterministic parts are evaluated once; only mixtures are drawn.
        std::vector<std::vector<std::optional<double>>> fixed(elements);
        for (std::size_t e = 0; e < elements; ++e)
            for (const auto* m : models[e])
                fixed[e].push_back(std::holds_alternative<MixtureApproach>(m->approach)
                                       ? std::nullopt
                                       : std::optional<double>(block_expectation(*m, job, registry)));
        std::vector<double> values(n * elements);
        detail::parallel_for(n, options.threads, [&](std::size_t r) {
            Rng rng = make_rng(options.seed, r);
            for (std::size_t e = 0; e < elements; ++e) {
                double v = 0.0;
                for (std::size_t j = 0; j < models[e].size(); ++j) {
                    const double x = fixed[e][j]
                                         ? *fixed[e][j]
                                         : draw_mixture(std::get<MixtureApproach>(models[e][j]->approach).mixture, rng);
                    v = std::max(v, x);
                }
                values[r * elements + e] = v;
            }
        });
        std::vector<double> totals(n, 0.0);
        std::vector<double> sums(elements, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t e = 0; e < elements; ++e) {
                totals[r] += values[r * elements + e];
                sums[e] += values[r * elements + e];
            }
        for (std::size_t e = 0; e < elements; ++e)
            p.per_block.push_back({plan.elements[e].members, sums[e] / static_cast<double>(n)});
        p.samples = std::move(totals);
    }
    for (const auto& c : p.per_block) p.point_hours += c.hours;
    return p;
}

JobSpec job_from_portcall(const Portcall& pc, const TerminalProfile& profile) {
    const auto ops = operation_intervals(pc.records);
    if (ops.empty()) throw InsufficientData("portcall " + pc.portcall_id + " has no cargo operations");
    JobSpec job;
    job.terminal = pc.terminal;
    job.shipment = pc.shipment();
    for (const auto& op : ops) job.cargoes.push_back({op.cargo, op.size_mt});
    job.mode = ops.size() == 1 ? OperationMode::Single
                               : classify_operation_mode(ops).value_or(OperationMode::Sequential);
    if (job.mode == OperationMode::Single && ops.size() > 1) job.mode = OperationMode::Sequential;
    job.needs_shifting = first_of(pc, EventKind::CommenceShifting).has_value();
    job.prewash_policy = profile.prewash_policy;
    return job;
}

std::optional<Timestamp> scenario_anchor(const Portcall& pc, Scenario scenario) {
    switch (scenario) {
        case Scenario::S1: return first_of(pc, EventKind::AllFast);
        case Scenario::S2: return first_of(pc, EventKind::SamplePass);
        case Scenario::S3: return first_of(pc, EventKind::CommenceOperation);
        case Scenario::S4: return last_of(pc, EventKind::CompleteOperation);
    }
    return std::nullopt;
}

std::optional<Timestamp> berth_stay_end(const Portcall& pc) {
    auto a = last_of(pc, EventKind::CargoArmDisconnected);
    auto b = last_of(pc, EventKind::MarpolPrewashArmDisconnected);
    if (a && b) return std::max(*a, *b);
    return a ? a : b;
}

std::map<BlockKind, double> observe_blocks(const Portcall& pc, const TerminalProfile& profile) {
    std::map<BlockKind, double> out;
    const auto job = job_from_portcall(pc, profile);
    const auto plan = build_chain(job, profile, Scenario::S1);
    std::optional<Timestamp> prev_end = first_of(pc, EventKind::AllFast);
    for (const auto& e : plan.elements) {
        for (auto k : e.members) {
            const auto end = block_end(pc, k);
            const auto start = is_gap_block(k) ? prev_end : block_start(pc, k);
            if (start && end && *start <= *end) out[k] = hours_between(*start, *end);
        }
        prev_end = element_end(pc, e);
    }
    return out;
}

const std::map<BlockKind, TruncatedMixture>& reference_block_mixtures() {
    static const std::map<BlockKind, TruncatedMixture> kTable = [] {
        using C = GaussianComponent;
        std::map<BlockKind, TruncatedMixture> t;
        t[BlockKind::Sampling] = TruncatedMixture::equal_weights({C{1.5, 2}, C{1.8, 0.5}, C{3.4, 1.8}}, 0.25, 5);
        t[BlockKind::TankInspection] =
            TruncatedMixture::equal_weights({C{0.08, 0.25}, C{0.25, 0.07}, C{0.5, 0.08}}, 0.05, 0.6);
        t[BlockKind::UBO] = TruncatedMixture::equal_weights({C{0.5, 0.1}, C{0.75, 0.1}, C{1, 0.13}}, 0.25, 2);
        t[BlockKind::CargoArmConnection] = TruncatedMixture::equal_weights({C{0.15, 0.07}, C{0.58, 0.2}}, 0.08, 2);
        t[BlockKind::CargoArmDisconnection] =
            TruncatedMixture::equal_weights({C{0.6, 0.06}, C{0.9, 0.125}, C{1.2, 0.15}}, 0.03, 2);
        t[BlockKind::PrewashArmConnection] =
            TruncatedMixture::equal_weights({C{0.6, 0.05}, C{0.9, 0.025}, C{1.3, 0.05}, C{1.8, 0.04}}, 0.08, 3);
        t[BlockKind::PrewashArmDisconnection] = TruncatedMixture::equal_weights({C{0.81, 0.25}}, 0.17, 3);
        return t;
    }();
    return kTable;
}

std::map<BlockKind, std::size_t> default_component_counts() {
    std::map<BlockKind, std::size_t> out;
    for (const auto& [k, m] : reference_block_mixtures()) out[k] = m.components.size();
    return out;
}

ModelRegistry fit_registry(std::span<const Portcall> training, const std::map<std::string, TerminalProfile>& profiles,
                           const FitOptions& options, FitReport* report) {
    ModelRegistry reg;
    reg.profiles = profiles;
    auto catalog = fit_catalog(training);
    reg.catalog = std::move(catalog.catalog);

    std::map<std::pair<std::string, BlockKind>, std::vector<double>> obs;
    for (const auto& pc : training) {
        if (pc.incomplete) continue;
        auto it = profiles.find(pc.terminal);
        if (it == profiles.end()) continue;
        const auto job = job_from_portcall(pc, it->second);
        for (const auto& [k, hours] : observe_blocks(pc, it->second)) {
            const bool proportional =
                k == BlockKind::Shifting || k == BlockKind::Prewash || k == BlockKind::Stripping;
            obs[{pc.terminal, k}].push_back(proportional ? hours / static_cast<double>(job.cargoes.size()) : hours);
        }
    }

    struct MixtureJob {
        std::pair<std::string, BlockKind> key;
        std::vector<double> data;
        std::uint64_t stream = 0;
    };
    std::vector<MixtureJob> mixture_jobs;
    std::vector<BlockFitEntry> entries;
    for (const auto& [terminal, profile] : profiles) {
        for (auto k : profile.observed_blocks) {
            const auto key = std::make_pair(terminal, k);
            const auto& data = obs[key];
            BlockFitEntry entry{terminal, k, data.size(), {}, {}, {}, true};
            if (k == BlockKind::CargoOperation) {
                reg.blocks[key] = {k, RegressionApproach{}};
                entry.approach = "regression";
            } else if (k == BlockKind::SafetyMeeting) {
                reg.blocks[key] = {k, FixedApproach{1.0}};
                entry.approach = "fixed";
            } else if (data.size() < 2) {
                entry.approach = "unavailable";
                entry.converged = false;
            } else if (k == BlockKind::Shifting || k == BlockKind::Prewash || k == BlockKind::Stripping) {
                reg.blocks[key] = {k, ProportionalApproach{mean(data)}};
                entry.approach = "proportional";
            } else {
                entry.approach = "mixture";
                mixture_jobs.push_back({key, data, mixture_jobs.size()});
            }
            entries.push_back(std::move(entry));
        }
    }

    std::vector<BlockModel> fitted(mixture_jobs.size());
    std::vector<BlockFitEntry> fit_entries(mixture_jobs.size());
    detail::parallel_for(mixture_jobs.size(), options.threads, [&](std::size_t i) {
        const auto& job = mixture_jobs[i];
        const auto kind = job.key.second;
        const auto [lo, hi] = std::minmax_element(job.data.begin(), job.data.end());
        auto& entry = fit_entries[i];
        if (*lo == *hi) {
            fitted[i] = {kind, FixedApproach{*lo}};
            return;
        }
        std::vector<double> distinct = job.data;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        FitConfig cfg;
        auto it = options.components.find(kind);
        cfg.n = std::min<std::size_t>(it == options.components.end() ? 1 : it->second, distinct.size());
        cfg.s = options.samples_per_iteration;
        cfg.max_iter = options.max_iter;
        cfg.rng_seed = derive_seed(options.seed, job.stream);
        cfg.lb = *lo;
        cfg.ub = *hi;
        const auto source = bootstrap_source(job.data, cfg.rng_seed);
        FitResult result;
        try {
            result = fit_mdgs(source, cfg);
        } catch (const FitNotConverged& e) {
            result = e.best();
            entry.converged = false;
        }
        fitted[i] = {kind, MixtureApproach{result.mixture}};
        entry.iterations = result.iterations;
        entry.ks = result.ks;
    });
    for (std::size_t i = 0; i < mixture_jobs.size(); ++i) {
        reg.blocks[mixture_jobs[i].key] = fitted[i];
        for (auto& e : entries)
            if (e.terminal == mixture_jobs[i].key.first && e.kind == mixture_jobs[i].key.second) {
                e.iterations = fit_entries[i].iterations;
                e.ks = fit_entries[i].ks;
                e.converged = fit_entries[i].converged;
                if (std::holds_alternative<FixedApproach>(fitted[i].approach)) e.approach = "fixed";
            }
    }
    if (report) {
        report->blocks = std::move(entries);
        report->regression_gaps = std::move(catalog.gaps);
    }
    return reg;
}

}  // namespace berthstay
