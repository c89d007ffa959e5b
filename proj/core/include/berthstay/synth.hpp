#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "berthstay/clean.hpp"
#include "berthstay/engine.hpp"
#include "berthstay/regress.hpp"

namespace berthstay {

struct SizeDistribution {
    double median_mt = 1000.0;
    double log_sigma = 0.5;
};

struct TerminalTruth {
    TerminalProfile profile;
    double weight = 1.0;
    double discharging_share = 0.5;
    // Probabilities of 1, 2, 3 cargoes.
    std::vector<double> cargo_count_weights{0.7, 0.2, 0.1};
    double concurrent_share = 0.5;  // of multi-cargo calls
    double shifting_share = 0.1;
    std::map<CargoGroup, double> group_weights{{CargoGroup::G1, 0.6}, {CargoGroup::G2, 0.3}, {CargoGroup::Other, 0.1}};
};

struct ErrorRates {
    double cargo_info = 0.0;
    double port_event = 0.0;
    double port_timing = 0.0;

    void validate() const;
};

struct GroundTruth {
    std::vector<TerminalTruth> terminals;
    RegressionCatalog lines;
    double operation_noise_sigma = 0.4;  // hours
    std::map<BlockKind, TruncatedMixture> mixtures;
    std::map<BlockKind, double> unit_hours;  // shifting, prewash, stripping per cargo
    double unit_spread = 0.1;                // log-sd of per-cargo proportional draws
    double safety_meeting_hours = 1.0;
    std::map<CargoGroup, SizeDistribution> sizes;
    // Sizes are rounded to this step; with a zero-noise line whose slope
    // times the step is a whole number of minutes, durations are exact.
    double size_step_mt = 25.0;
    std::vector<std::string> other_cargo_names{"HVI 60", "BRIGHT STOCK"};
    Timestamp first_start;
    Timestamp last_start;
    ErrorRates error_rates;

    void validate() const;
};

// Terminals A and B with the published block mixtures.
GroundTruth default_ground_truth();

struct TruthOperation {
    std::string cargo;
    double size_mt = 0.0;
    double hours = 0.0;
};

struct TruthEntry {
    std::string portcall_id;
    std::vector<std::pair<BlockKind, double>> blocks;  // drawn durations in chain order
    std::vector<TruthOperation> operations;
};

struct Generated {
    std::vector<Portcall> portcalls;
    std::vector<TruthEntry> truth;
};

// Portcall i uses RNG substream i of `seed`.
Generated generate_portcalls(const GroundTruth& truth, std::size_t count, std::uint64_t seed);

struct Corruption {
    std::string portcall_id;
    std::size_t record_index = 0;  // index in the portcall as given
    ViolationClass cls = ViolationClass::CargoInfo;
    std::string before;
    std::string after;
};

struct Injection {
    std::vector<Portcall> portcalls;
    std::vector<Corruption> manifest;
    std::size_t eligible_cargo_info = 0;
    std::size_t eligible_port_event = 0;
    std::size_t eligible_port_timing = 0;
};

// Each eligible record is corrupted independently per class: G1 grade typo,
// substitution by the next different event, month/day swap (day <= 12 and
// day != month). Record order is preserved so manifest indices stay valid.
Injection inject_errors(std::span<const Portcall> portcalls, const ErrorRates& rates, std::uint64_t seed);

}  // namespace berthstay
