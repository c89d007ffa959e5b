#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "berthstay/vocabulary.hpp"

namespace berthstay {

enum class ViolationClass : std::uint8_t { CargoInfo, PortEvent, PortTiming };

std::string_view violation_class_name(ViolationClass cls);

struct Violation {
    std::string portcall_id;
    std::optional<std::size_t> record_index;  // absent for "event missing"
    ViolationClass cls = ViolationClass::PortEvent;
    std::string description;
    bool repairable = false;
};

struct CleaningPolicy {
    double max_discard_fraction = 1.0;
    // Records further than this from every neighbour are timing anomalies.
    std::int64_t max_neighbor_gap_minutes = 7 * 24 * 60;
    int max_repairs_per_portcall = 64;
};

std::vector<Violation> validate_portcall(const Portcall& pc, const CleaningPolicy& policy = {});

// ts itself if already in [prev, next]; otherwise the month/day-swapped
// instant when that is a valid date inside the window; otherwise nullopt.
// Throws DomainError if prev > next.
std::optional<Timestamp> repair_timestamp(Timestamp ts, Timestamp prev, Timestamp next);

struct Repair {
    std::string portcall_id;
    std::size_t record_index = 0;  // index into the input portcall's records
    ViolationClass cls = ViolationClass::CargoInfo;
    std::string action;
    std::string before;
    std::string after;
};

struct DiscardedPortcall {
    Portcall portcall;
    std::vector<Violation> violations;
};

struct CleaningOutcome {
    std::vector<Portcall> cleaned;
    std::vector<DiscardedPortcall> discarded;
    std::vector<Repair> audit;  // ordered by portcall_id
};

// Throws DiscardBudgetExceeded when discarded/total exceeds the policy bound.
CleaningOutcome apply_cleaning(std::span<const Portcall> portcalls, const CleaningPolicy& policy = {});

void write_audit_csv(std::ostream& out, std::span<const Repair> audit);

}  // namespace berthstay
