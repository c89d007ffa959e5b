#include <gtest/gtest.h>

#include "berthstay/clean.hpp"
#include "berthstay/error.hpp"
#include "berthstay/synth.hpp"

namespace berthstay {
namespace {

TEST(GeneratePortcalls, EmptyAndDeterministic) {
    const auto truth = default_ground_truth();
    const auto none = generate_portcalls(truth, 0, 1);
    EXPECT_TRUE(none.portcalls.empty());
    EXPECT_TRUE(none.truth.empty());
    const auto a = generate_portcalls(truth, 50, 99);
    const auto b = generate_portcalls(truth, 50, 99);
    EXPECT_EQ(a.portcalls, b.portcalls);
    ASSERT_EQ(a.truth.size(), 50u);
    EXPECT_EQ(a.truth[7].blocks, b.truth[7].blocks);
    EXPECT_NE(generate_portcalls(truth, 50, 100).portcalls, a.portcalls);
}

TEST(GeneratePortcalls, PrefixStableAcrossCounts) {
    const auto truth = default_ground_truth();
    const auto small = generate_portcalls(truth, 10, 5);
    const auto large = generate_portcalls(truth, 40, 5);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(small.portcalls[i], large.portcalls[i]);
}

TEST(GeneratePortcalls, TerminalBCallsStartAtOperation) {
    const auto gen = generate_portcalls(default_ground_truth(), 100, 6);
    for (const auto& pc : gen.portcalls) {
        if (pc.terminal != "B") continue;
        for (const auto& r : pc.records) {
            EXPECT_NE(r.event, EventKind::CommenceSampling);
            EXPECT_NE(r.event, EventKind::CommenceUllageBeforeOperation);
            EXPECT_NE(r.event, EventKind::MarpolPrewashArmConnected);
        }
    }
}

TEST(InjectErrors, ZeroRatesIsIdentity) {
    const auto gen = generate_portcalls(default_ground_truth(), 30, 2);
    const auto inj = inject_errors(gen.portcalls, {}, 3);
    EXPECT_EQ(inj.portcalls, gen.portcalls);
    EXPECT_TRUE(inj.manifest.empty());
}

TEST(InjectErrors, TimingSwapOnlyWhereEligible) {
    const auto gen = generate_portcalls(default_ground_truth(), 30, 2);
    const auto inj = inject_errors(gen.portcalls, {.port_timing = 1.0}, 3);
    ASSERT_FALSE(inj.manifest.empty());
    EXPECT_EQ(inj.manifest.size(), inj.eligible_port_timing);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < gen.portcalls.size(); ++i) index[gen.portcalls[i].portcall_id] = i;
    for (const auto& c : inj.manifest) {
        EXPECT_EQ(c.cls, ViolationClass::PortTiming);
        const auto& before = gen.portcalls[index[c.portcall_id]].records[c.record_index].timestamp;
        const auto& after = inj.portcalls[index[c.portcall_id]].records[c.record_index].timestamp;
        EXPECT_LE(before.day(), 12u);
        EXPECT_EQ(swap_month_day(before), after);
    }
}

TEST(InjectErrors, SameSeedSameManifest) {
    const auto gen = generate_portcalls(default_ground_truth(), 100, 2);
    const ErrorRates rates{0.1, 0.1, 0.1};
    const auto a = inject_errors(gen.portcalls, rates, 8);
    const auto b = inject_errors(gen.portcalls, rates, 8);
    ASSERT_EQ(a.manifest.size(), b.manifest.size());
    for (std::size_t i = 0; i < a.manifest.size(); ++i) {
        EXPECT_EQ(a.manifest[i].portcall_id, b.manifest[i].portcall_id);
        EXPECT_EQ(a.manifest[i].record_index, b.manifest[i].record_index);
        EXPECT_EQ(a.manifest[i].after, b.manifest[i].after);
    }
    EXPECT_EQ(a.portcalls, b.portcalls);
}

TEST(InjectErrors, TypoIsDetectedAsCargoInfo) {
    const auto gen = generate_portcalls(default_ground_truth(), 50, 2);
    const auto inj = inject_errors(gen.portcalls, {.cargo_info = 1.0}, 1);
    ASSERT_FALSE(inj.manifest.empty());
    for (const auto& pc : inj.portcalls)
        for (const auto& v : validate_portcall(pc)) EXPECT_EQ(v.cls, ViolationClass::CargoInfo) << v.description;
}

TEST(ErrorRates, Validation) {
    EXPECT_THROW((ErrorRates{1.5, 0, 0}.validate()), ConfigError);
    EXPECT_THROW((ErrorRates{0, -0.1, 0}.validate()), ConfigError);
}

}  // namespace
}  // namespace berthstay
