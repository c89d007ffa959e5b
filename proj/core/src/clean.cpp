#include "berthstay/clean.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "berthstay/csv.hpp"
#include "berthstay/error.hpp"

namespace berthstay {
namespace {

enum class PairKey { Global, ArmOrCargo };

struct EventPair {
    EventKind start;
    EventKind end;
    PairKey key;
};

constexpr EventPair kPairs[] = {
    {EventKind::CommenceSampling, EventKind::SamplePass, PairKey::Global},
    {EventKind::CommenceSafetyMeeting, EventKind::CompleteSafetyMeeting, PairKey::Global},
    {EventKind::CommenceUllageBeforeOperation, EventKind::CompleteUllageBeforeOperation, PairKey::Global},
    {EventKind::CommenceTankInspection, EventKind::CompleteTankInspection, PairKey::Global},
    {EventKind::CommenceShifting, EventKind::CompleteShifting, PairKey::Global},
    {EventKind::CommencePrewash, EventKind::CompletePrewash, PairKey::Global},
    {EventKind::CommenceStrippingToShore, EventKind::CompleteStrippingToShore, PairKey::Global},
    {EventKind::MarpolPrewashArmConnected, EventKind::MarpolPrewashArmDisconnected, PairKey::Global},
    {EventKind::CommenceOperation, EventKind::CompleteOperation, PairKey::ArmOrCargo},
    {EventKind::CargoArmConnected, EventKind::CargoArmDisconnected, PairKey::ArmOrCargo},
};

std::string record_key(const StandardRecord& r, PairKey key) {
    if (key == PairKey::Global) return {};
    if (r.arm_id) return "arm:" + std::to_string(*r.arm_id);
    return "cargo:" + (r.cargo ? r.cargo->canonical_name : std::string{});
}

std::string name(EventKind k) { return std::string(event_name(k)); }

bool swap_changes(Timestamp ts) {
    auto s = swap_month_day(ts);
    return s && *s != ts;
}

std::vector<Violation> validate_records(const std::string& portcall_id, std::span<const StandardRecord> recs,
                                        const CleaningPolicy& policy) {
    std::vector<Violation> out;
    auto add = [&](std::optional<std::size_t> idx, ViolationClass cls, std::string desc, bool repairable) {
        out.push_back({portcall_id, idx, cls, std::move(desc), repairable});
    };
    auto timing = [&](std::size_t idx, std::string desc) {
        add(idx, ViolationClass::PortTiming, std::move(desc), swap_changes(recs[idx].timestamp));
    };
    if (recs.empty()) return out;
    const ShipmentType shipment = recs.front().shipment;

    std::vector<std::size_t> by_kind[kEventKindCount];
    for (std::size_t i = 0; i < recs.size(); ++i) by_kind[static_cast<std::size_t>(recs[i].event)].push_back(i);
    auto of = [&](EventKind k) -> const std::vector<std::size_t>& { return by_kind[static_cast<std::size_t>(k)]; };
    auto by_time = [&](std::vector<std::size_t> v) {
        std::stable_sort(v.begin(), v.end(), [&](auto a, auto b) { return recs[a].timestamp < recs[b].timestamp; });
        return v;
    };

    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        if (r.cargo && r.cargo->via_typo_rule)
            add(i, ViolationClass::CargoInfo,
                "cargo '" + r.cargo->recorded_label + "' resolved to " + r.cargo->canonical_name +
                    " only by typo normalization",
                true);
        if (!applies_to(r.event, shipment))
            add(i, ViolationClass::PortEvent,
                name(r.event) + " does not apply to " + std::string(shipment_name(shipment)), true);
    }

    const auto& all_fast = of(EventKind::AllFast);
    if (all_fast.empty()) add(std::nullopt, ViolationClass::PortEvent, "missing All Fast", true);
    for (std::size_t k = 1; k < all_fast.size(); ++k)
        add(all_fast[k], ViolationClass::PortEvent, "duplicate All Fast", true);

    for (const auto& pair : kPairs) {
        if (pair.start == EventKind::CargoArmConnected && of(EventKind::CargoArmConnected).empty()) continue;
        std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
        for (auto i : of(pair.start)) groups[record_key(recs[i], pair.key)].first.push_back(i);
        for (auto i : of(pair.end)) groups[record_key(recs[i], pair.key)].second.push_back(i);
        for (auto& [key, g] : groups) {
            const auto starts = by_time(g.first);
            const auto ends = by_time(g.second);
            // One block (or one arm) runs once per portcall.
            for (std::size_t k = 1; k < starts.size(); ++k)
                add(starts[k], ViolationClass::PortEvent, "duplicate " + name(pair.start), true);
            for (std::size_t k = 1; k < ends.size(); ++k)
                add(ends[k], ViolationClass::PortEvent, "duplicate " + name(pair.end), true);
            if (starts.size() == ends.size()) {
                for (std::size_t k = 0; k < starts.size(); ++k)
                    if (recs[ends[k]].timestamp < recs[starts[k]].timestamp)
                        timing(ends[k], name(pair.end) + " precedes its " + name(pair.start));
            } else if (starts.size() > ends.size()) {
                for (std::size_t k = ends.size(); k < starts.size(); ++k)
                    add(starts[k], ViolationClass::PortEvent,
                        name(pair.start) + " without matching " + name(pair.end), true);
            } else {
                for (std::size_t k = 0; k < ends.size() - starts.size(); ++k)
                    add(ends[k], ViolationClass::PortEvent,
                        name(pair.end) + " without matching " + name(pair.start), true);
            }
        }
    }

    // Block endpoints that are not Commence/Complete pairs.
    if (all_fast.size() == 1) {
        const auto anchor = recs[all_fast.front()].timestamp;
        for (std::size_t i = 0; i < recs.size(); ++i)
            if (recs[i].timestamp < anchor) timing(i, name(recs[i].event) + " precedes All Fast");
    }
    if (of(EventKind::CompleteUllageBeforeOperation).size() == 1) {
        const auto ubo_end = recs[of(EventKind::CompleteUllageBeforeOperation).front()].timestamp;
        for (auto i : of(EventKind::CargoArmConnected))
            if (recs[i].timestamp < ubo_end) timing(i, "Cargo Arm Connected precedes Complete Ullage Before Operation");
    }
    for (auto i : of(EventKind::CargoArmDisconnected)) {
        const auto key = record_key(recs[i], PairKey::ArmOrCargo);
        for (auto j : of(EventKind::CompleteOperation))
            if (record_key(recs[j], PairKey::ArmOrCargo) == key && recs[i].timestamp < recs[j].timestamp) {
                timing(i, "Cargo Arm Disconnected precedes its Complete Operation");
                break;
            }
    }
    // Per arm: connected <= commence, and a disconnection needs an operation.
    if (!of(EventKind::CargoArmConnected).empty())
        for (auto i : of(EventKind::CommenceOperation)) {
            const auto key = record_key(recs[i], PairKey::ArmOrCargo);
            std::optional<Timestamp> connected;
            for (auto j : of(EventKind::CargoArmConnected))
                if (record_key(recs[j], PairKey::ArmOrCargo) == key) connected = recs[j].timestamp;
            if (!connected)
                add(i, ViolationClass::PortEvent, "Commence Operation without Cargo Arm Connected on the same arm",
                    true);
            else if (recs[i].timestamp < *connected)
                timing(i, "Commence Operation precedes its Cargo Arm Connected");
        }
    for (auto i : of(EventKind::CargoArmDisconnected)) {
        const auto key = record_key(recs[i], PairKey::ArmOrCargo);
        const auto& completes = of(EventKind::CompleteOperation);
        if (std::none_of(completes.begin(), completes.end(),
                         [&](std::size_t j) { return record_key(recs[j], PairKey::ArmOrCargo) == key; }))
            add(i, ViolationClass::PortEvent, "Cargo Arm Disconnected without an operation on the same arm", true);
    }
    for (auto i : of(EventKind::MarpolPrewashArmConnected))
        for (auto j : of(EventKind::CargoArmDisconnected))
            if (recs[i].timestamp < recs[j].timestamp) {
                timing(i, "Marpol Prewash Arm Connected precedes Cargo Arm Disconnected");
                break;
            }
    for (auto i : of(EventKind::MarpolPrewashArmDisconnected))
        for (auto k : {EventKind::CompletePrewash, EventKind::CompleteStrippingToShore}) {
            bool hit = false;
            for (auto j : of(k))
                if (recs[i].timestamp < recs[j].timestamp) {
                    timing(i, "Marpol Prewash Arm Disconnected precedes " + name(k));
                    hit = true;
                    break;
                }
            if (hit) break;
        }

    // Split the timeline wherever consecutive records are further apart than
    // the gap bound; everything outside the largest cluster has jumped.
    std::vector<std::size_t> order(recs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    order = by_time(order);
    std::vector<std::pair<std::size_t, std::size_t>> clusters;  // [begin, end) in `order`
    std::size_t begin = 0;
    for (std::size_t p = 1; p <= order.size(); ++p)
        if (p == order.size() ||
            recs[order[p]].timestamp.minutes() - recs[order[p - 1]].timestamp.minutes() > policy.max_neighbor_gap_minutes) {
            clusters.emplace_back(begin, p);
            begin = p;
        }
    if (clusters.size() > 1) {
        std::size_t largest = 0;
        for (const auto& [b, e] : clusters) largest = std::max(largest, e - b);
        const auto keepers = std::count_if(clusters.begin(), clusters.end(),
                                           [&](const auto& c) { return c.second - c.first == largest; });
        for (const auto& [b, e] : clusters) {
            if (e - b == largest && keepers == 1) continue;
            for (std::size_t p = b; p < e; ++p)
                timing(order[p], name(recs[order[p]].event) + " lies away from the rest of the portcall");
        }
    }
    return out;
}

// A record being cleaned, tagged with its index in the input portcall.
struct Tracked {
    StandardRecord rec;
    std::size_t orig = 0;
};

void sort_tracked(std::vector<Tracked>& v) {
    std::stable_sort(v.begin(), v.end(), [](const Tracked& a, const Tracked& b) {
        if (a.rec.timestamp != b.rec.timestamp) return a.rec.timestamp < b.rec.timestamp;
        return canonical_event_order(a.rec.event) < canonical_event_order(b.rec.event);
    });
}

std::vector<StandardRecord> plain(const std::vector<Tracked>& v) {
    std::vector<StandardRecord> out;
    out.reserve(v.size());
    for (const auto& t : v) out.push_back(t.rec);
    return out;
}

struct Edit {
    enum class Kind { Relabel, Swap } kind = Kind::Relabel;
    std::size_t position = 0;  // index into the working vector
    EventKind new_event = EventKind::AllFast;
    Timestamp new_time;
};

std::optional<EventKind> pair_partner(EventKind k) {
    for (const auto& p : kPairs) {
        if (p.start == k) return p.end;
        if (p.end == k) return p.start;
    }
    return std::nullopt;
}

std::vector<Tracked> apply_edit(std::vector<Tracked> work, const Edit& e) {
    auto& r = work[e.position].rec;
    if (e.kind == Edit::Kind::Swap) {
        r.timestamp = e.new_time;
    } else {
        const bool had_cargo = r.cargo.has_value();
        r.event = e.new_event;
        if (event_type(e.new_event) == EventType::General) {
            r.cargo.reset();
            r.size_mt.reset();
            r.arm_id.reset();
        } else if (!had_cargo) {
            // Borrow cargo fields from the nearest pair partner, else the nearest cargo record.
            const auto partner = pair_partner(e.new_event);
            std::optional<std::size_t> best;
            for (int pass = 0; pass < 2 && !best; ++pass) {
                std::int64_t best_gap = 0;
                for (std::size_t j = 0; j < work.size(); ++j) {
                    const auto& o = work[j].rec;
                    if (j == e.position || !o.cargo) continue;
                    if (pass == 0 && (!partner || o.event != *partner)) continue;
                    const auto gap = std::abs(o.timestamp.minutes() - r.timestamp.minutes());
                    if (!best || gap < best_gap) {
                        best = j;
                        best_gap = gap;
                    }
                }
            }
            if (best) {
                r.cargo = work[*best].rec.cargo;
                r.size_mt = work[*best].rec.size_mt;
                r.arm_id = work[*best].rec.arm_id;
            }
        }
    }
    sort_tracked(work);
    return work;
}

std::vector<Edit> candidate_edits(const std::vector<Tracked>& work, const std::vector<Violation>& violations,
                                  const CleaningPolicy& policy) {
    std::vector<Edit> edits;
    if (work.empty()) return edits;

    std::set<EventKind> targets;
    std::set<EventKind> surplus;
    std::set<std::size_t> timing_records;
    for (const auto& v : violations) {
        if (v.cls == ViolationClass::PortTiming && v.record_index) timing_records.insert(*v.record_index);
        if (v.cls != ViolationClass::PortEvent) continue;
        if (!v.record_index) {
            targets.insert(EventKind::AllFast);
            continue;
        }
        const auto kind = work[*v.record_index].rec.event;
        surplus.insert(kind);
        if (v.description.find("without matching") != std::string::npos)
            if (auto p = pair_partner(kind)) targets.insert(*p);
    }

    // Month/day swap, accepted only inside the portcall's span widened by the gap bound.
    for (auto i : timing_records) {
        std::int64_t lo = 0, hi = 0;
        bool any = false;
        for (std::size_t j = 0; j < work.size(); ++j) {
            if (j == i) continue;
            const auto m = work[j].rec.timestamp.minutes();
            lo = any ? std::min(lo, m) : m;
            hi = any ? std::max(hi, m) : m;
            any = true;
        }
        if (!any) continue;
        const auto ts = work[i].rec.timestamp;
        auto fixed = repair_timestamp(ts, Timestamp{lo - policy.max_neighbor_gap_minutes},
                                      Timestamp{hi + policy.max_neighbor_gap_minutes});
        if (fixed && *fixed != ts) edits.push_back({Edit::Kind::Swap, i, work[i].rec.event, *fixed});
    }

    for (auto target : targets)
        for (std::size_t i = 0; i < work.size(); ++i) {
            const auto kind = work[i].rec.event;
            // A missing All Fast may hide under any label; other targets draw
            // only from kinds that are themselves in surplus.
            if (kind == target || (target != EventKind::AllFast && !surplus.contains(kind))) continue;
            edits.push_back({Edit::Kind::Relabel, i, target, {}});
        }
    return edits;
}

std::string describe(const StandardRecord& r) { return name(r.event) + " @ " + r.timestamp.to_string(); }

}  // namespace

std::string_view violation_class_name(ViolationClass cls) {
    switch (cls) {
        case ViolationClass::CargoInfo: return "CargoInfo";
        case ViolationClass::PortEvent: return "PortEvent";
        case ViolationClass::PortTiming: return "PortTiming";
    }
    return "PortEvent";
}

std::vector<Violation> validate_portcall(const Portcall& pc, const CleaningPolicy& policy) {
    return validate_records(pc.portcall_id, pc.records, policy);
}

std::optional<Timestamp> repair_timestamp(Timestamp ts, Timestamp prev, Timestamp next) {
    if (next < prev) throw DomainError("repair_timestamp: neighbour window is inverted");
    if (prev <= ts && ts <= next) return ts;
    auto swapped = swap_month_day(ts);
    if (swapped && prev <= *swapped && *swapped <= next) return swapped;
    return std::nullopt;
}

CleaningOutcome apply_cleaning(std::span<const Portcall> portcalls, const CleaningPolicy& policy) {
    CleaningOutcome outcome;

    for (const auto& input : portcalls) {
        std::vector<Tracked> work;
        for (std::size_t i = 0; i < input.records.size(); ++i) work.push_back({input.records[i], i});
        sort_tracked(work);

        std::vector<Repair> repairs;
        std::vector<Violation> violations;
        bool accepted = false;
        auto score = [&](const std::vector<Tracked>& w) {
            return validate_records(input.portcall_id, plain(w), policy).size();
        };

        for (int iter = 0; iter <= policy.max_repairs_per_portcall; ++iter) {
            violations = validate_records(input.portcall_id, plain(work), policy);
            if (violations.empty()) {
                accepted = true;
                break;
            }
            if (iter == policy.max_repairs_per_portcall) break;

            bool cargo_fixed = false;
            for (const auto& v : violations) {
                if (v.cls != ViolationClass::CargoInfo || !v.record_index) continue;
                auto& t = work[*v.record_index];
                repairs.push_back({input.portcall_id, t.orig, ViolationClass::CargoInfo, "canonicalize_cargo",
                                   t.rec.cargo->recorded_label, t.rec.cargo->canonical_name});
                t.rec.cargo->recorded_label = t.rec.cargo->canonical_name;
                t.rec.cargo->via_typo_rule = false;
                cargo_fixed = true;
            }
            if (cargo_fixed) continue;

            const auto edits = candidate_edits(work, violations, policy);
            std::vector<std::pair<std::size_t, std::vector<Tracked>>> results;
            for (const auto& e : edits) {
                auto next = apply_edit(work, e);
                results.emplace_back(score(next), std::move(next));
            }
            std::size_t best = violations.size();
            for (const auto& r : results) best = std::min(best, r.first);
            if (best >= violations.size()) break;

            std::vector<std::size_t> tied;
            for (std::size_t k = 0; k < results.size(); ++k)
                if (results[k].first == best) tied.push_back(k);
            const std::size_t chosen = tied.front();
            const auto chosen_plain = plain(results[chosen].second);
            bool ambiguous = false;
            for (std::size_t k = 1; k < tied.size() && !ambiguous; ++k) {
                const auto& other = edits[tied[k]];
                if (plain(results[tied[k]].second) == chosen_plain) continue;
                if (work[other.position].orig == work[edits[chosen].position].orig) {
                    ambiguous = true;
                    break;
                }
                // Independent fixes compose; alternatives for the same defect do not.
                auto pos = std::find_if(results[chosen].second.begin(), results[chosen].second.end(),
                                        [&](const Tracked& t) { return t.orig == work[other.position].orig; });
                Edit moved = other;
                moved.position = static_cast<std::size_t>(pos - results[chosen].second.begin());
                if (score(apply_edit(results[chosen].second, moved)) >= best) ambiguous = true;
            }
            if (ambiguous) break;

            const auto& e = edits[chosen];
            const auto& before = work[e.position];
            auto after = std::find_if(results[chosen].second.begin(), results[chosen].second.end(),
                                      [&](const Tracked& t) { return t.orig == before.orig; });
            if (e.kind == Edit::Kind::Swap)
                repairs.push_back({input.portcall_id, before.orig, ViolationClass::PortTiming, "swap_month_day",
                                   before.rec.timestamp.to_string(), after->rec.timestamp.to_string()});
            else
                repairs.push_back({input.portcall_id, before.orig, ViolationClass::PortEvent, "relabel_event",
                                   describe(before.rec), describe(after->rec)});
            work = std::move(results[chosen].second);
        }

        if (accepted) {
            Portcall pc = input;
            pc.records = plain(work);
            refresh_portcall(pc);
            outcome.cleaned.push_back(std::move(pc));
            outcome.audit.insert(outcome.audit.end(), repairs.begin(), repairs.end());
        } else {
            outcome.discarded.push_back({input, std::move(violations)});
        }
    }

    std::stable_sort(outcome.audit.begin(), outcome.audit.end(),
                     [](const Repair& a, const Repair& b) { return a.portcall_id < b.portcall_id; });

    if (!portcalls.empty()) {
        const double fraction = static_cast<double>(outcome.discarded.size()) / static_cast<double>(portcalls.size());
        if (fraction > policy.max_discard_fraction)
            throw DiscardBudgetExceeded("discarded " + std::to_string(outcome.discarded.size()) + " of " +
                                            std::to_string(portcalls.size()) + " portcalls, above the budget of " +
                                            csv::format_number(policy.max_discard_fraction),
                                        fraction);
    }
    return outcome;
}

void write_audit_csv(std::ostream& out, std::span<const Repair> audit) {
    out << "portcall_id,record_index,class,action,before,after\n";
    for (const auto& r : audit) {
        const std::string fields[] = {r.portcall_id,
                                      std::to_string(r.record_index),
                                      std::string(violation_class_name(r.cls)),
                                      r.action,
                                      r.before,
                                      r.after};
        csv::write_row(out, fields);
    }
}

}  // namespace berthstay
