#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "berthstay/error.hpp"
#include "berthstay/vocabulary.hpp"

namespace berthstay {

inline constexpr std::string_view kLogHeader =
    "portcall_id,terminal,vessel_name,imo,mmsi,event,timestamp,cargo,size_mt,shipment_type,arm_id";

// Lower-cases and removes all whitespace; alias keys are stored this way.
std::string normalize_label(std::string_view label);

// Terminal-specific vocabulary mapped onto the standard events and grades.
class AliasMap {
public:
    // Both throw ConfigError if the canonical target is not a standard event
    // name / focused cargo grade.
    void add_event_alias(std::string_view alias, std::string_view canonical_event);
    void add_cargo_alias(std::string_view alias, std::string_view canonical_grade);

    // Two-column CSV `alias,canonical` (header row required).
    void load_event_aliases(std::istream& in);
    void load_cargo_aliases(std::istream& in);

    const std::map<std::string, EventKind>& event_aliases() const { return events_; }
    const std::map<std::string, std::string>& cargo_aliases() const { return cargo_; }

private:
    std::map<std::string, EventKind> events_;
    std::map<std::string, std::string> cargo_;
};

class UnknownEvent : public Error {
public:
    UnknownEvent(std::string label, std::vector<std::string> suggestions);

    const std::string& label() const noexcept { return label_; }
    // The three closest standard event names by edit distance.
    const std::vector<std::string>& suggestions() const noexcept { return suggestions_; }

private:
    std::string label_;
    std::vector<std::string> suggestions_;
};

EventKind standardize_event(std::string_view label, const AliasMap& aliases);

// Never fails: unresolvable labels become group Other with the trimmed label.
CargoRef standardize_cargo(std::string_view label, const AliasMap& aliases);

struct Rejection {
    std::size_t line_number = 0;
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<Rejection> rejections;
};

struct ParsedLog {
    std::vector<StandardRecord> records;
    std::map<std::string, VesselIdentity> vessels;  // by portcall_id
    IngestReport report;
};

// Throws FormatError when the header is missing or differs from kLogHeader.
ParsedLog parse_log(std::istream& in, const AliasMap& aliases);

void write_log(std::ostream& out, std::span<const Portcall> portcalls);

// Groups by portcall_id in order of first appearance.
std::vector<Portcall> assemble_portcalls(std::vector<StandardRecord> records,
                                         const std::map<std::string, VesselIdentity>& vessels = {});

struct SplitCounts {
    std::size_t total = 0;
    std::size_t single = 0;
    std::size_t multiple = 0;
    std::size_t sequential = 0;
    std::size_t concurrent = 0;

    friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

// One column of the data statistics table. "Focused" means G1 or G2.
struct TerminalStatistics {
    std::string terminal;

    std::size_t portcalls = 0;
    std::size_t portcalls_loading = 0;
    std::size_t portcalls_discharging = 0;
    SplitCounts portcalls_loading_focused;
    SplitCounts portcalls_discharging_focused;

    std::size_t operations = 0;
    std::size_t ops_loading = 0;
    std::size_t ops_loading_focused = 0;
    std::size_t ops_loading_other = 0;
    std::size_t ops_discharging = 0;
    std::size_t ops_discharging_focused = 0;
    std::size_t ops_discharging_other = 0;
    SplitCounts ops_loading_g1;
    SplitCounts ops_loading_g2;
    SplitCounts ops_discharging_g1;
    SplitCounts ops_discharging_g2;

    friend bool operator==(const TerminalStatistics&, const TerminalStatistics&) = default;
};

struct StatisticsRow {
    std::string label;
    std::vector<std::size_t> values;  // one per terminal column, then "All"
};

struct StatisticsTable {
    std::vector<TerminalStatistics> terminals;  // sorted by name
    TerminalStatistics all;

    std::vector<StatisticsRow> rows() const;
};

StatisticsTable data_statistics(std::span<const Portcall> portcalls);

void write_statistics_csv(std::ostream& out, const StatisticsTable& table);

}  // namespace berthstay
