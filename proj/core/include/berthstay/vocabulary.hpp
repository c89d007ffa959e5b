#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "berthstay/timestamp.hpp"

namespace berthstay {

// The key operation events recorded at berth, in canonical chain order.
enum class EventKind : std::uint8_t {
    AllFast,
    SurveyorOnBoard,
    CommenceSafetyMeeting,
    CompleteSafetyMeeting,
    CommenceUllageBeforeOperation,
    CompleteUllageBeforeOperation,
    CommenceSampling,
    SamplePass,
    CargoArmConnected,
    CommenceOperation,
    CompleteOperation,
    CommenceTankInspection,
    CompleteTankInspection,
    CargoArmDisconnected,
    CommenceShifting,
    CompleteShifting,
    MarpolPrewashArmConnected,
    CommencePrewash,
    CompletePrewash,
    CommenceStrippingToShore,
    CompleteStrippingToShore,
    MarpolPrewashArmDisconnected,
};

inline constexpr std::size_t kEventKindCount = 22;

enum class EventType : std::uint8_t { General, Cargo };

enum class ShipmentType : std::uint8_t { Loading, Discharging };

enum class CargoGroup : std::uint8_t { G1, G2, Other };

enum class OperationMode : std::uint8_t { Single, Sequential, Concurrent };

// Processing blocks (a)-(l) a berth stay decomposes into.
enum class BlockKind : std::uint8_t {
    Sampling,
    TankInspection,
    SafetyMeeting,
    UBO,
    CargoArmConnection,
    CargoOperation,
    CargoArmDisconnection,
    Shifting,
    PrewashArmConnection,
    Prewash,
    Stripping,
    PrewashArmDisconnection,
};

inline constexpr std::size_t kBlockKindCount = 12;

const std::array<EventKind, kEventKindCount>& all_event_kinds();
const std::array<BlockKind, kBlockKindCount>& all_block_kinds();

std::string_view event_name(EventKind kind);
EventType event_type(EventKind kind);
bool applies_to(EventKind kind, ShipmentType shipment);

// Position in the canonical chain; AllFast is 0 and every Commence ranks
// below its Complete.
int canonical_event_order(EventKind kind);

// Exact display name lookup ("Cargo Arm Disconnected"). Case-sensitive.
std::optional<EventKind> event_from_name(std::string_view name);

std::string_view shipment_name(ShipmentType shipment);
std::optional<ShipmentType> shipment_from_name(std::string_view name);  // case-insensitive

std::string_view group_name(CargoGroup group);
std::optional<CargoGroup> group_from_name(std::string_view name);

std::string_view operation_mode_name(OperationMode mode);
std::optional<OperationMode> operation_mode_from_name(std::string_view name);  // case-insensitive

std::string_view block_name(BlockKind kind);
char block_label(BlockKind kind);  // 'a'..'l'
std::optional<BlockKind> block_from_name(std::string_view name);

struct CargoGrade {
    std::string_view name;
    CargoGroup group;
};

// Focused grades: base oils (G1) and EHC grades (G2).
std::span<const CargoGrade> focused_grades();
std::optional<CargoGroup> grade_group(std::string_view canonical_name);

struct CargoRef {
    std::string canonical_name;
    CargoGroup group = CargoGroup::Other;
    // Label written back when the record is serialized: the canonical name,
    // except for typo-resolved cargoes, which keep the text as recorded so the
    // finding survives until cleaning repairs it.
    std::string recorded_label;
    // Resolved only through the typo normalization rules ("N150", "150").
    bool via_typo_rule = false;

    friend bool operator==(const CargoRef&, const CargoRef&) = default;
};

struct StandardRecord {
    std::string portcall_id;
    std::string terminal;
    EventKind event = EventKind::AllFast;
    Timestamp timestamp;
    ShipmentType shipment = ShipmentType::Loading;
    std::optional<CargoRef> cargo;
    std::optional<double> size_mt;
    std::optional<int> arm_id;

    friend bool operator==(const StandardRecord&, const StandardRecord&) = default;
};

// Carried for completeness; no model consumes vessel features.
struct VesselIdentity {
    std::string name;
    std::string imo;
    std::string mmsi;
    std::optional<double> length_m;
    std::optional<double> width_m;
    std::string type;
    std::string flag;

    friend bool operator==(const VesselIdentity&, const VesselIdentity&) = default;
};

struct OperationInterval {
    std::size_t commence_index = 0;
    std::size_t complete_index = 0;
    Timestamp start;
    Timestamp end;
    CargoRef cargo;
    double size_mt = 0.0;
    std::optional<int> arm_id;

    double hours() const { return hours_between(start, end); }
};

// Pairs CommenceOperation/CompleteOperation records (sorted by time) by arm id,
// falling back to cargo name, then to the oldest open operation.
std::vector<OperationInterval> operation_intervals(std::span<const StandardRecord> records);

// Single iff exactly one interval; Concurrent iff any two overlap for a
// positive duration; Sequential otherwise. nullopt when there are none.
std::optional<OperationMode> classify_operation_mode(std::span<const OperationInterval> ops);

struct Portcall {
    std::string portcall_id;
    std::string terminal;
    std::optional<VesselIdentity> vessel;
    std::vector<StandardRecord> records;
    std::optional<OperationMode> operation_mode;
    // No CommenceOperation at all: kept for statistics, excluded from fitting.
    bool incomplete = false;

    ShipmentType shipment() const;

    friend bool operator==(const Portcall&, const Portcall&) = default;
};

// Stable sort by (timestamp, canonical rank).
void sort_records(std::vector<StandardRecord>& records);

// Re-sorts records and recomputes operation_mode / incomplete.
void refresh_portcall(Portcall& pc);

using PrewashPolicy = std::map<CargoGroup, bool>;

// Always false for loading; otherwise policy[group]. ConfigError when the
// group is absent from the policy.
bool requires_prewash(CargoGroup group, ShipmentType shipment, const PrewashPolicy& policy);

}  // namespace berthstay
