#include <gtest/gtest.h>

#include <set>

#include "berthstay/error.hpp"
#include "berthstay/vocabulary.hpp"
#include "oracles.hpp"

namespace berthstay {
namespace {

using testing::ts;

TEST(Vocabulary, EnumerationsHaveFixedSizes) {
    EXPECT_EQ(all_event_kinds().size(), 22u);
    EXPECT_EQ(all_block_kinds().size(), 12u);
    std::set<EventKind> events(all_event_kinds().begin(), all_event_kinds().end());
    EXPECT_EQ(events.size(), 22u);
}

TEST(Vocabulary, CanonicalOrder) {
    EXPECT_EQ(canonical_event_order(EventKind::AllFast), 0);
    EXPECT_LT(canonical_event_order(EventKind::CommenceOperation), canonical_event_order(EventKind::CompleteOperation));
    int max_rank = 0;
    for (auto e : all_event_kinds()) max_rank = std::max(max_rank, canonical_event_order(e));
    EXPECT_EQ(canonical_event_order(EventKind::MarpolPrewashArmDisconnected), max_rank);
}

TEST(Vocabulary, EventTagsAndApplicability) {
    EXPECT_EQ(event_type(EventKind::AllFast), EventType::General);
    EXPECT_EQ(event_type(EventKind::CargoArmConnected), EventType::Cargo);
    EXPECT_FALSE(applies_to(EventKind::MarpolPrewashArmConnected, ShipmentType::Loading));
    EXPECT_TRUE(applies_to(EventKind::MarpolPrewashArmConnected, ShipmentType::Discharging));
    EXPECT_FALSE(applies_to(EventKind::CommenceSampling, ShipmentType::Loading));
    EXPECT_TRUE(applies_to(EventKind::CommenceOperation, ShipmentType::Loading));
}

TEST(Vocabulary, NamesRoundTrip) {
    for (auto e : all_event_kinds()) EXPECT_EQ(event_from_name(event_name(e)), e);
    for (auto b : all_block_kinds()) EXPECT_EQ(block_from_name(block_name(b)), b);
    EXPECT_EQ(block_label(BlockKind::Sampling), 'a');
    EXPECT_EQ(block_label(BlockKind::PrewashArmDisconnection), 'l');
    EXPECT_EQ(shipment_from_name("discharging"), ShipmentType::Discharging);
    EXPECT_EQ(operation_mode_from_name("CONCURRENT"), OperationMode::Concurrent);
    EXPECT_FALSE(group_from_name("G3"));
}

TEST(Vocabulary, FocusedGrades) {
    EXPECT_EQ(grade_group("150N"), CargoGroup::G1);
    EXPECT_EQ(grade_group("EHC 50"), CargoGroup::G2);
    EXPECT_FALSE(grade_group("NAPHTHA"));
}

TEST(Vocabulary, RequiresPrewash) {
    const PrewashPolicy policy{{CargoGroup::G1, true}, {CargoGroup::G2, false}};
    EXPECT_FALSE(requires_prewash(CargoGroup::G1, ShipmentType::Loading, policy));
    EXPECT_TRUE(requires_prewash(CargoGroup::G1, ShipmentType::Discharging, policy));
    EXPECT_FALSE(requires_prewash(CargoGroup::G2, ShipmentType::Discharging, policy));
    EXPECT_THROW(requires_prewash(CargoGroup::Other, ShipmentType::Discharging, policy), ConfigError);
}

TEST(Vocabulary, OperationModeFromIntervals) {
    using testing::cargo;
    using E = EventKind;
    auto p2 = testing::make_portcall("P2", {cargo("P2", E::CommenceOperation, "2018-01-10 10:00", "150N", 1, 1),
                                            cargo("P2", E::CompleteOperation, "2018-01-10 14:00", "150N", 1, 1),
                                            cargo("P2", E::CommenceOperation, "2018-01-10 12:00", "600N", 1, 2),
                                            cargo("P2", E::CompleteOperation, "2018-01-10 16:00", "600N", 1, 2)});
    EXPECT_EQ(p2.operation_mode, OperationMode::Concurrent);
    auto p3 = testing::make_portcall("P3", {cargo("P3", E::CommenceOperation, "2018-01-10 10:00", "150N", 1, 1),
                                            cargo("P3", E::CompleteOperation, "2018-01-10 12:00", "150N", 1, 1),
                                            cargo("P3", E::CommenceOperation, "2018-01-10 13:00", "600N", 1, 1),
                                            cargo("P3", E::CompleteOperation, "2018-01-10 15:00", "600N", 1, 1)});
    EXPECT_EQ(p3.operation_mode, OperationMode::Sequential);
    EXPECT_EQ(testing::loading_portcall("P1").operation_mode, OperationMode::Single);
    auto none = testing::make_portcall("P4", {testing::general("P4", E::AllFast, "2018-01-10 08:00")});
    EXPECT_FALSE(none.operation_mode);
    EXPECT_TRUE(none.incomplete);
}

TEST(Timestamp, ParseAndSwap) {
    EXPECT_EQ(ts("2018-01-10 10:00").to_string(), "2018-01-10 10:00");
    EXPECT_EQ(parse_timestamp("2018-13-01 10:00").error, TimestampParseError::InvalidDate);
    EXPECT_EQ(parse_timestamp("2018-02-29 10:00").error, TimestampParseError::InvalidDate);
    EXPECT_TRUE(parse_timestamp("2020-02-29 23:59").value);
    EXPECT_EQ(parse_timestamp("2018-01-01 24:00").error, TimestampParseError::InvalidTime);
    EXPECT_EQ(parse_timestamp("2018/01/01 10:00").error, TimestampParseError::Malformed);
    EXPECT_EQ(swap_month_day(ts("2018-10-01 10:00")), ts("2018-01-10 10:00"));
    EXPECT_FALSE(swap_month_day(ts("2018-01-25 10:00")));
    EXPECT_DOUBLE_EQ(hours_between(ts("2018-01-10 10:00"), ts("2018-01-11 11:30")), 25.5);
}

}  // namespace
}  // namespace berthstay
