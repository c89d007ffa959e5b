#include "berthstay/vocabulary.hpp"

#include <algorithm>
#include <cctype>

#include "berthstay/error.hpp"

namespace berthstay {
namespace {

struct EventInfo {
    EventKind kind;
    std::string_view name;
    bool loading;
    bool discharging;
    EventType type;
};

constexpr EventType G = EventType::General;
constexpr EventType C = EventType::Cargo;

// Row order is the canonical chain order.
constexpr std::array<EventInfo, kEventKindCount> kEvents{{
    {EventKind::AllFast, "All Fast", true, true, G},
    {EventKind::SurveyorOnBoard, "Surveyor On Board", true, true, G},
    {EventKind::CommenceSafetyMeeting, "Commence Safety Meeting", true, true, G},
    {EventKind::CompleteSafetyMeeting, "Complete Safety Meeting", true, true, G},
    {EventKind::CommenceUllageBeforeOperation, "Commence Ullage Before Operation", true, true, G},
    {EventKind::CompleteUllageBeforeOperation, "Complete Ullage Before Operation", true, true, G},
    {EventKind::CommenceSampling, "Commence Sampling", false, true, C},
    {EventKind::SamplePass, "Sample Pass", false, true, C},
    {EventKind::CargoArmConnected, "Cargo Arm Connected", true, true, C},
    {EventKind::CommenceOperation, "Commence Operation", true, true, C},
    {EventKind::CompleteOperation, "Complete Operation", true, true, C},
    {EventKind::CommenceTankInspection, "Commence Tank Inspection", true, true, G},
    {EventKind::CompleteTankInspection, "Complete Tank Inspection", true, true, G},
    {EventKind::CargoArmDisconnected, "Cargo Arm Disconnected", true, true, C},
    {EventKind::CommenceShifting, "Commence Shifting", true, true, G},
    {EventKind::CompleteShifting, "Complete Shifting", true, true, G},
    {EventKind::MarpolPrewashArmConnected, "Marpol Prewash Arm Connected", false, true, C},
    {EventKind::CommencePrewash, "Commence Prewash", false, true, C},
    {EventKind::CompletePrewash, "Complete Prewash", false, true, C},
    {EventKind::CommenceStrippingToShore, "Commence Stripping to Shore", false, true, C},
    {EventKind::CompleteStrippingToShore, "Complete Stripping to Shore", false, true, C},
    {EventKind::MarpolPrewashArmDisconnected, "Marpol Prewash Arm Disconnected", false, true, C},
}};

constexpr std::array<std::string_view, kBlockKindCount> kBlockNames{
    "Sampling",           "TankInspection",         "SafetyMeeting", "UBO",
    "CargoArmConnection", "CargoOperation",         "CargoArmDisconnection",
    "Shifting",           "PrewashArmConnection",   "Prewash",       "Stripping",
    "PrewashArmDisconnection",
};

constexpr std::array<CargoGrade, 9> kGrades{{
    {"70N", CargoGroup::G1},
    {"100N", CargoGroup::G1},
    {"150N", CargoGroup::G1},
    {"400N", CargoGroup::G1},
    {"500N", CargoGroup::G1},
    {"600N", CargoGroup::G1},
    {"2500N", CargoGroup::G1},
    {"EHC 50", CargoGroup::G2},
    {"EHC 110", CargoGroup::G2},
}};

const EventInfo& info(EventKind kind) { return kEvents[static_cast<std::size_t>(kind)]; }

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

const std::array<EventKind, kEventKindCount>& all_event_kinds() {
    static const auto kinds = [] {
        std::array<EventKind, kEventKindCount> out{};
        for (std::size_t i = 0; i < kEventKindCount; ++i) out[i] = kEvents[i].kind;
        return out;
    }();
    return kinds;
}

const std::array<BlockKind, kBlockKindCount>& all_block_kinds() {
    static const auto kinds = [] {
        std::array<BlockKind, kBlockKindCount> out{};
        for (std::size_t i = 0; i < kBlockKindCount; ++i) out[i] = static_cast<BlockKind>(i);
        return out;
    }();
    return kinds;
}

std::string_view event_name(EventKind kind) { return info(kind).name; }
EventType event_type(EventKind kind) { return info(kind).type; }

bool applies_to(EventKind kind, ShipmentType shipment) {
    return shipment == ShipmentType::Loading ? info(kind).loading : info(kind).discharging;
}

int canonical_event_order(EventKind kind) { return static_cast<int>(kind); }

std::optional<EventKind> event_from_name(std::string_view name) {
    for (const auto& e : kEvents)
        if (e.name == name) return e.kind;
    return std::nullopt;
}

std::string_view shipment_name(ShipmentType shipment) {
    return shipment == ShipmentType::Loading ? "Loading" : "Discharging";
}

std::optional<ShipmentType> shipment_from_name(std::string_view name) {
    if (iequals(name, "Loading")) return ShipmentType::Loading;
    if (iequals(name, "Discharging")) return ShipmentType::Discharging;
    return std::nullopt;
}

std::string_view group_name(CargoGroup group) {
    switch (group) {
        case CargoGroup::G1: return "G1";
        case CargoGroup::G2: return "G2";
        case CargoGroup::Other: return "Other";
    }
    return "Other";
}

std::optional<CargoGroup> group_from_name(std::string_view name) {
    if (iequals(name, "G1")) return CargoGroup::G1;
    if (iequals(name, "G2")) return CargoGroup::G2;
    if (iequals(name, "Other")) return CargoGroup::Other;
    return std::nullopt;
}

std::string_view operation_mode_name(OperationMode mode) {
    switch (mode) {
        case OperationMode::Single: return "Single";
        case OperationMode::Sequential: return "Sequential";
        case OperationMode::Concurrent: return "Concurrent";
    }
    return "Single";
}

std::optional<OperationMode> operation_mode_from_name(std::string_view name) {
    for (auto m : {OperationMode::Single, OperationMode::Sequential, OperationMode::Concurrent})
        if (iequals(name, operation_mode_name(m))) return m;
    return std::nullopt;
}

std::string_view block_name(BlockKind kind) { return kBlockNames[static_cast<std::size_t>(kind)]; }

char block_label(BlockKind kind) { return static_cast<char>('a' + static_cast<int>(kind)); }

std::optional<BlockKind> block_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kBlockKindCount; ++i)
        if (iequals(kBlockNames[i], name)) return static_cast<BlockKind>(i);
    return std::nullopt;
}

std::span<const CargoGrade> focused_grades() { return kGrades; }

std::optional<CargoGroup> grade_group(std::string_view canonical_name) {
    for (const auto& g : kGrades)
        if (g.name == canonical_name) return g.group;
    return std::nullopt;
}

std::vector<OperationInterval> operation_intervals(std::span<const StandardRecord> records) {
    struct Open {
        std::size_t index;
        bool used = false;
    };
    std::vector<Open> open;
    std::vector<OperationInterval> out;

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.event == EventKind::CommenceOperation) {
            open.push_back({i});
            continue;
        }
        if (r.event != EventKind::CompleteOperation) continue;

        auto pick = [&](auto&& pred) -> Open* {
            for (auto& o : open)
                if (!o.used && pred(records[o.index])) return &o;
            return nullptr;
        };
        Open* match = nullptr;
        if (r.arm_id)
            match = pick([&](const StandardRecord& c) { return c.arm_id == r.arm_id; });
        if (!match && r.cargo)
            match = pick([&](const StandardRecord& c) {
                return !(c.arm_id && r.arm_id) && c.cargo &&
                       c.cargo->canonical_name == r.cargo->canonical_name;
            });
        if (!match && !r.arm_id) match = pick([](const StandardRecord&) { return true; });
        if (!match) continue;

        match->used = true;
        const auto& c = records[match->index];
        OperationInterval op;
        op.commence_index = match->index;
        op.complete_index = i;
        op.start = c.timestamp;
        op.end = r.timestamp;
        if (c.cargo) op.cargo = *c.cargo;
        op.size_mt = c.size_mt.value_or(0.0);
        op.arm_id = c.arm_id;
        out.push_back(std::move(op));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.commence_index < b.commence_index; });
    return out;
}

std::optional<OperationMode> classify_operation_mode(std::span<const OperationInterval> ops) {
    if (ops.empty()) return std::nullopt;
    if (ops.size() == 1) return OperationMode::Single;
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const auto lo = std::max(ops[i].start, ops[j].start);
            const auto hi = std::min(ops[i].end, ops[j].end);
            if (lo < hi) return OperationMode::Concurrent;
        }
    return OperationMode::Sequential;
}

ShipmentType Portcall::shipment() const {
    return records.empty() ? ShipmentType::Loading : records.front().shipment;
}

void sort_records(std::vector<StandardRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return canonical_event_order(a.event) < canonical_event_order(b.event);
    });
}

void refresh_portcall(Portcall& pc) {
    sort_records(pc.records);
    const auto ops = operation_intervals(pc.records);
    pc.operation_mode = classify_operation_mode(ops);
    pc.incomplete = std::none_of(pc.records.begin(), pc.records.end(), [](const auto& r) {
        return r.event == EventKind::CommenceOperation;
    });
}

bool requires_prewash(CargoGroup group, ShipmentType shipment, const PrewashPolicy& policy) {
    if (shipment == ShipmentType::Loading) return false;
    auto it = policy.find(group);
    if (it == policy.end())
        throw ConfigError("prewash policy has no entry for cargo group " + std::string(group_name(group)));
    return it->second;
}

}  // namespace berthstay
