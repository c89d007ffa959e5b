#include "berthstay/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "berthstay/error.hpp"

namespace berthstay {
namespace {

CargoRef make_cargo(const std::string& name, CargoGroup group) { return CargoRef{name, group, name, false}; }

std::string pick_grade(CargoGroup group, const GroundTruth& truth, Rng& rng) {
    std::vector<std::string> names;
    if (group == CargoGroup::Other) {
        names = truth.other_cargo_names;
    } else {
        for (const auto& g : focused_grades())
            if (g.group == group) names.emplace_back(g.name);
    }
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    return names[pick(rng)];
}

std::string format_id(const std::string& terminal, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-%06zu", i + 1);
    return terminal + buf;
}

bool is_g1_grade_name(const CargoRef& c) {
    return c.group == CargoGroup::G1 && !c.via_typo_rule && c.canonical_name.size() > 1 && c.canonical_name.back() == 'N';
}

}  // namespace

void ErrorRates::validate() const {
    for (double r : {cargo_info, port_event, port_timing})
        if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("error rates must lie in [0, 1]");
}

void GroundTruth::validate() const {
    if (terminals.empty()) throw ConfigError("ground truth has no terminals");
    for (const auto& [k, m] : mixtures) m.validate();
    for (const auto& t : terminals) {
        if (!(t.weight >= 0.0)) throw ConfigError("terminal weight must be non-negative");
        if (t.cargo_count_weights.empty()) throw ConfigError("terminal needs cargo count weights");
    }
    if (!(size_step_mt > 0.0)) throw ConfigError("size step must be positive");
    if (last_start < first_start) throw ConfigError("start window is inverted");
    error_rates.validate();
}

GroundTruth default_ground_truth() {
    GroundTruth t;
    TerminalTruth a;
    a.profile = default_profile_a();
    a.weight = 0.6;
    a.discharging_share = 0.8;
    a.shifting_share = 0.1;
    TerminalTruth b;
    b.profile = default_profile_b();
    b.weight = 0.4;
    b.discharging_share = 0.35;
    b.shifting_share = 0.0;
    t.terminals = {a, b};

    struct Line {
        const char* terminal;
        CargoGroup group;
        ShipmentType shipment;
        double a, b;
    };
    const Line lines[] = {
        {"A", CargoGroup::G1, ShipmentType::Discharging, 0.004, 1.2},
        {"A", CargoGroup::G2, ShipmentType::Discharging, 0.0035, 1.5},
        {"A", CargoGroup::Other, ShipmentType::Discharging, 0.003, 2.0},
        {"A", CargoGroup::G1, ShipmentType::Loading, 0.0032, 1.0},
        {"A", CargoGroup::G2, ShipmentType::Loading, 0.003, 1.3},
        {"A", CargoGroup::Other, ShipmentType::Loading, 0.0028, 1.6},
        {"B", CargoGroup::G1, ShipmentType::Discharging, 0.0045, 0.9},
        {"B", CargoGroup::G2, ShipmentType::Discharging, 0.004, 1.1},
        {"B", CargoGroup::Other, ShipmentType::Discharging, 0.0035, 1.4},
        {"B", CargoGroup::G1, ShipmentType::Loading, 0.0038, 0.8},
        {"B", CargoGroup::G2, ShipmentType::Loading, 0.0034, 1.0},
        {"B", CargoGroup::Other, ShipmentType::Loading, 0.003, 1.2},
    };
    for (const auto& l : lines) {
        RegressionKey key{l.terminal, l.group, l.shipment};
        t.lines[key] = LinearModel{l.a, l.b, 0, key};
    }
    t.mixtures = reference_block_mixtures();
    t.unit_hours = {{BlockKind::Shifting, 0.5}, {BlockKind::Prewash, 1.2}, {BlockKind::Stripping, 0.9}};
    // Observed cargo sizes cluster around 500 MT and 2000 MT; illustrative only.
    t.sizes = {{CargoGroup::G1, {1500.0, 0.6}}, {CargoGroup::G2, {600.0, 0.5}}, {CargoGroup::Other, {800.0, 0.5}}};
    t.first_start = *Timestamp::from_civil(2018, 1, 1, 0, 0);
    t.last_start = *Timestamp::from_civil(2020, 8, 31, 0, 0);
    return t;
}

Generated generate_portcalls(const GroundTruth& truth, std::size_t count, std::uint64_t seed) {
    truth.validate();
    Generated out;
    out.portcalls.reserve(count);
    out.truth.reserve(count);

    std::vector<double> terminal_weights;
    for (const auto& t : truth.terminals) terminal_weights.push_back(t.weight);

    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = make_rng(seed, i);
        std::normal_distribution<double> z(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);

        const auto& tt = truth.terminals[std::discrete_distribution<std::size_t>(terminal_weights.begin(),
                                                                                 terminal_weights.end())(rng)];
        const auto& profile = tt.profile;
        JobSpec job;
        job.terminal = profile.name;
        job.shipment = u(rng) < tt.discharging_share ? ShipmentType::Discharging : ShipmentType::Loading;
        job.prewash_policy = profile.prewash_policy;
        const std::size_t n_cargo =
            1 + std::discrete_distribution<std::size_t>(tt.cargo_count_weights.begin(), tt.cargo_count_weights.end())(rng);
        std::vector<CargoGroup> groups;
        std::vector<double> group_w;
        for (const auto& [g, w] : tt.group_weights) {
            groups.push_back(g);
            group_w.push_back(w);
        }
        std::discrete_distribution<std::size_t> pick_group(group_w.begin(), group_w.end());
        for (std::size_t c = 0; c < n_cargo; ++c) {
            CargoGroup g = groups[pick_group(rng)];
            std::string name = pick_grade(g, truth, rng);
            for (int tries = 0; tries < 20; ++tries) {
                const bool dup = std::any_of(job.cargoes.begin(), job.cargoes.end(),
                                             [&](const JobCargo& jc) { return jc.cargo.canonical_name == name; });
                if (!dup) break;
                g = groups[pick_group(rng)];
                name = pick_grade(g, truth, rng);
            }
            const auto& sd = truth.sizes.at(g);
            const double raw = sd.median_mt * std::exp(sd.log_sigma * z(rng));
            const double size = std::max(truth.size_step_mt, std::round(raw / truth.size_step_mt) * truth.size_step_mt);
            job.cargoes.push_back({make_cargo(name, g), size});
        }
        job.mode = n_cargo == 1 ? OperationMode::Single
                                : (u(rng) < tt.concurrent_share ? OperationMode::Concurrent : OperationMode::Sequential);
        job.needs_shifting = profile.observed_blocks.contains(BlockKind::Shifting) && u(rng) < tt.shifting_share;

        const auto plan = build_chain(job, profile, Scenario::S1);
        const auto span_minutes = truth.last_start.minutes() - truth.first_start.minutes();
        std::int64_t t = truth.first_start.minutes() +
                         std::uniform_int_distribution<std::int64_t>(0, std::max<std::int64_t>(span_minutes, 0))(rng);

        Portcall pc;
        pc.portcall_id = format_id(profile.name, i);
        pc.terminal = profile.name;
        // Only the identity columns the event log carries.
        pc.vessel = VesselIdentity{"SYNTH " + pc.portcall_id, std::to_string(9000000 + i), std::to_string(563000000 + i)};
        TruthEntry entry;
        entry.portcall_id = pc.portcall_id;

        const JobCargo* lead_prewash = &job.cargoes.front();
        for (const auto& c : job.cargoes)
            if (requires_prewash(c.cargo.group, job.shipment, job.prewash_policy)) {
                lead_prewash = &c;
                break;
            }
        auto emit = [&](EventKind kind, std::int64_t minute, const JobCargo* cargo, std::optional<int> arm) {
            StandardRecord r;
            r.portcall_id = pc.portcall_id;
            r.terminal = pc.terminal;
            r.event = kind;
            r.timestamp = Timestamp{minute};
            r.shipment = job.shipment;
            if (event_type(kind) == EventType::Cargo && cargo) {
                r.cargo = cargo->cargo;
                r.size_mt = cargo->size_mt;
                r.arm_id = arm;
            }
            pc.records.push_back(std::move(r));
        };
        auto to_minutes = [](double hours) { return static_cast<std::int64_t>(std::llround(hours * 60.0)); };
        auto proportional = [&](BlockKind k) {
            const double c = truth.unit_hours.at(k);
            const double s = truth.unit_spread;
            double total = 0.0;
            for (std::size_t j = 0; j < n_cargo; ++j) total += c * std::exp(s * z(rng) - 0.5 * s * s);
            return total;
        };

        emit(EventKind::AllFast, t, nullptr, std::nullopt);
        if (profile.records_surveyor) emit(EventKind::SurveyorOnBoard, t, nullptr, std::nullopt);

        for (const auto& element : plan.elements) {
            if (element.parallel()) {
                std::int64_t longest = 0;
                for (auto k : element.members) {
                    const double h = proportional(k);
                    entry.blocks.emplace_back(k, h);
                    const auto m = to_minutes(h);
                    longest = std::max(longest, m);
                    const bool prewash = k == BlockKind::Prewash;
                    emit(prewash ? EventKind::CommencePrewash : EventKind::CommenceStrippingToShore, t, lead_prewash,
                         std::nullopt);
                    emit(prewash ? EventKind::CompletePrewash : EventKind::CompleteStrippingToShore, t + m,
                         lead_prewash, std::nullopt);
                }
                t += longest;
                continue;
            }
            const BlockKind k = element.members.front();
            if (k == BlockKind::CargoOperation) {
                std::vector<double> hours;
                std::int64_t cursor = t, end = t;
                for (std::size_t j = 0; j < n_cargo; ++j) {
                    const auto& c = job.cargoes[j];
                    const auto& line = truth.lines.at({profile.name, c.cargo.group, job.shipment});
                    double h = line.a * c.size_mt + line.b;
                    if (truth.operation_noise_sigma > 0.0) h += truth.operation_noise_sigma * z(rng);
                    h = std::max(h, 1.0 / 60.0);
                    hours.push_back(h);
                    entry.operations.push_back({c.cargo.canonical_name, c.size_mt, h});
                    const auto m = to_minutes(h);
                    const std::int64_t start = job.mode == OperationMode::Concurrent ? t : cursor;
                    emit(EventKind::CommenceOperation, start, &c, static_cast<int>(j + 1));
                    emit(EventKind::CompleteOperation, start + m, &c, static_cast<int>(j + 1));
                    cursor = start + m;
                    end = std::max(end, start + m);
                }
                entry.blocks.emplace_back(k, aggregate_cargo_ops(hours, job.mode));
                t = end;
                continue;
            }
            double h = 0.0;
            if (k == BlockKind::SafetyMeeting)
                h = truth.safety_meeting_hours;
            else if (k == BlockKind::Shifting)
                h = proportional(k);
            else
                h = draw_mixture(truth.mixtures.at(k), rng);
            entry.blocks.emplace_back(k, h);
            const auto end = t + to_minutes(h);
            const JobCargo* lead = &job.cargoes.front();
            switch (k) {
                case BlockKind::Sampling:
                    emit(EventKind::CommenceSampling, t, lead, std::nullopt);
                    emit(EventKind::SamplePass, end, lead, std::nullopt);
                    break;
                case BlockKind::SafetyMeeting:
                    emit(EventKind::CommenceSafetyMeeting, t, nullptr, std::nullopt);
                    emit(EventKind::CompleteSafetyMeeting, end, nullptr, std::nullopt);
                    break;
                case BlockKind::TankInspection:
                    emit(EventKind::CommenceTankInspection, t, nullptr, std::nullopt);
                    emit(EventKind::CompleteTankInspection, end, nullptr, std::nullopt);
                    break;
                case BlockKind::UBO:
                    emit(EventKind::CommenceUllageBeforeOperation, t, nullptr, std::nullopt);
                    emit(EventKind::CompleteUllageBeforeOperation, end, nullptr, std::nullopt);
                    break;
                case BlockKind::Shifting:
                    emit(EventKind::CommenceShifting, t, nullptr, std::nullopt);
                    emit(EventKind::CompleteShifting, end, nullptr, std::nullopt);
                    break;
                case BlockKind::CargoArmConnection:
                    for (std::size_t j = 0; j < n_cargo; ++j)
                        emit(EventKind::CargoArmConnected, end, &job.cargoes[j], static_cast<int>(j + 1));
                    break;
                case BlockKind::CargoArmDisconnection:
                    for (std::size_t j = 0; j < n_cargo; ++j)
                        emit(EventKind::CargoArmDisconnected, end, &job.cargoes[j], static_cast<int>(j + 1));
                    break;
                case BlockKind::PrewashArmConnection:
                    emit(EventKind::MarpolPrewashArmConnected, end, lead_prewash, std::nullopt);
                    break;
                case BlockKind::PrewashArmDisconnection:
                    emit(EventKind::MarpolPrewashArmDisconnected, end, lead_prewash, std::nullopt);
                    break;
                default: break;
            }
            t = end;
        }
        refresh_portcall(pc);
        out.portcalls.push_back(std::move(pc));
        out.truth.push_back(std::move(entry));
    }
    return out;
}

Injection inject_errors(std::span<const Portcall> portcalls, const ErrorRates& rates, std::uint64_t seed) {
    rates.validate();
    Injection out;
    out.portcalls.assign(portcalls.begin(), portcalls.end());
    for (std::size_t p = 0; p < out.portcalls.size(); ++p) {
        auto& pc = out.portcalls[p];
        const auto original = pc.records;
        Rng rng = make_rng(seed, p);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t i = 0; i < pc.records.size(); ++i) {
            auto& r = pc.records[i];
            if (r.cargo && is_g1_grade_name(*r.cargo)) {
                ++out.eligible_cargo_info;
                if (u(rng) < rates.cargo_info) {
                    const std::string digits = r.cargo->canonical_name.substr(0, r.cargo->canonical_name.size() - 1);
                    const std::string typo = u(rng) < 0.5 ? "N" + digits : digits;
                    out.manifest.push_back({pc.portcall_id, i, ViolationClass::CargoInfo, r.cargo->recorded_label, typo});
                    r.cargo->recorded_label = typo;
                    r.cargo->via_typo_rule = true;
                }
            }
            std::optional<std::size_t> next;
            for (std::size_t j = i + 1; j < original.size(); ++j)
                if (original[j].event != original[i].event) {
                    next = j;
                    break;
                }
            if (next) {
                ++out.eligible_port_event;
                if (u(rng) < rates.port_event) {
                    const auto& src = original[*next];
                    out.manifest.push_back({pc.portcall_id, i, ViolationClass::PortEvent,
                                            std::string(event_name(r.event)), std::string(event_name(src.event))});
                    r.event = src.event;
                    if (event_type(r.event) == EventType::General) {
                        r.cargo.reset();
                        r.size_mt.reset();
                        r.arm_id.reset();
                    } else if (!r.cargo) {
                        r.cargo = src.cargo;
                        r.size_mt = src.size_mt;
                        r.arm_id = src.arm_id;
                    }
                }
            }
            const auto ts = r.timestamp;
            if (ts.day() <= 12 && ts.day() != ts.month()) {
                ++out.eligible_port_timing;
                if (u(rng) < rates.port_timing) {
                    if (auto swapped = swap_month_day(ts)) {
                        out.manifest.push_back(
                            {pc.portcall_id, i, ViolationClass::PortTiming, ts.to_string(), swapped->to_string()});
                        r.timestamp = *swapped;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace berthstay
