#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "berthstay/mdgs.hpp"
#include "berthstay/regress.hpp"
#include "berthstay/vocabulary.hpp"

namespace berthstay {

// Prediction starting points: All Fast, Sample Pass, Commence Operation,
// Complete Operation.
enum class Scenario : std::uint8_t { S1 = 1, S2 = 2, S3 = 3, S4 = 4 };

const std::array<Scenario, 4>& all_scenarios();
std::string_view scenario_name(Scenario s);  // "S1".."S4"
std::optional<Scenario> scenario_from_name(std::string_view name);  // "S1" or "1"

struct RegressionApproach {
    friend bool operator==(const RegressionApproach&, const RegressionApproach&) = default;
};
struct MixtureApproach {
    TruncatedMixture mixture;
    friend bool operator==(const MixtureApproach&, const MixtureApproach&) = default;
};
// n_cargoes * unit_hours
struct ProportionalApproach {
    double unit_hours = 0.0;
    friend bool operator==(const ProportionalApproach&, const ProportionalApproach&) = default;
};
struct FixedApproach {
    double hours = 0.0;
    friend bool operator==(const FixedApproach&, const FixedApproach&) = default;
};

using BlockApproach = std::variant<RegressionApproach, MixtureApproach, ProportionalApproach, FixedApproach>;

struct BlockModel {
    BlockKind kind = BlockKind::CargoOperation;
    BlockApproach approach;

    friend bool operator==(const BlockModel&, const BlockModel&) = default;
};

enum class TankInspectionPosition : std::uint8_t {
    AfterSafetyMeeting,      // generic chain
    BeforeArmDisconnection,  // event-table order
};

struct TerminalProfile {
    std::string name;
    // Blocks this terminal's logs can observe; the rest never enter its chains.
    std::set<BlockKind> observed_blocks;
    bool supports_sampling = true;
    bool records_surveyor = true;
    PrewashPolicy prewash_policy;
    TankInspectionPosition tank_inspection = TankInspectionPosition::AfterSafetyMeeting;

    friend bool operator==(const TerminalProfile&, const TerminalProfile&) = default;
};

// Full event coverage with sampling; prewash for G1 only.
TerminalProfile default_profile_a();
// Only operation and arm disconnection recorded; no sampling or prewash.
TerminalProfile default_profile_b();

struct JobCargo {
    CargoRef cargo;
    double size_mt = 0.0;
};

struct JobSpec {
    std::string terminal;
    ShipmentType shipment = ShipmentType::Discharging;
    std::vector<JobCargo> cargoes;
    OperationMode mode = OperationMode::Single;
    bool needs_shifting = false;
    PrewashPolicy prewash_policy;

    // Throws DomainError unless cargoes are non-empty, sizes non-negative, and
    // mode is Single exactly when there is one cargo.
    void validate() const;
    bool requires_prewash() const;
};

// One step of a chain; more than one member means the members run in
// parallel and the step lasts as long as the slowest.
struct ChainElement {
    std::vector<BlockKind> members;

    bool parallel() const { return members.size() > 1; }
    friend bool operator==(const ChainElement&, const ChainElement&) = default;
};

struct ChainPlan {
    Scenario scenario = Scenario::S1;
    std::vector<ChainElement> elements;

    std::vector<BlockKind> blocks() const;
};

// Throws NotApplicable for S2 on loading jobs or terminals without sampling.
ChainPlan build_chain(const JobSpec& job, const TerminalProfile& profile, Scenario scenario);

// Sequential and Single sum, Concurrent takes the max. Empty is a DomainError.
double aggregate_cargo_ops(std::span<const double> durations, OperationMode mode);

struct ModelRegistry {
    RegressionCatalog catalog;
    std::map<std::string, TerminalProfile> profiles;
    std::map<std::pair<std::string, BlockKind>, BlockModel> blocks;
    double duration_floor = kDefaultDurationFloor;

    // Both throw ModelUnavailable naming what is missing.
    const TerminalProfile& profile(const std::string& terminal) const;
    const BlockModel& block(const std::string& terminal, BlockKind kind) const;
};

double block_expectation(const BlockModel& model, const JobSpec& job, const ModelRegistry& registry);
double block_sample(const BlockModel& model, const JobSpec& job, const ModelRegistry& registry, Rng& rng);

struct PredictOptions {
    std::size_t mc_count = 0;  // 0 selects expectation mode
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct ElementContribution {
    std::vector<BlockKind> blocks;
    double hours = 0.0;
};

struct Prediction {
    Scenario scenario = Scenario::S1;
    double point_hours = 0.0;  // sum of per_block hours
    std::optional<std::vector<double>> samples;  // Monte Carlo chain totals
    std::vector<ElementContribution> per_block;  // chain order

    // Nearest-rank quantile of the samples; nullopt in expectation mode.
    std::optional<double> quantile(double q) const;
};

Prediction predict_berth_stay(const ModelRegistry& registry, const JobSpec& job, Scenario scenario,
                              const PredictOptions& options = {});

// Job description recovered from a logged portcall.
JobSpec job_from_portcall(const Portcall& pc, const TerminalProfile& profile);

// Event at which a scenario's prediction starts, and the final arm
// disconnection. Both nullopt when the portcall lacks the events.
std::optional<Timestamp> scenario_anchor(const Portcall& pc, Scenario scenario);
std::optional<Timestamp> berth_stay_end(const Portcall& pc);

// Observed duration of every block of the job's S1 chain that the portcall
// records. Gap blocks (arm connections and disconnections) run from the end
// of the preceding chain element.
std::map<BlockKind, double> observe_blocks(const Portcall& pc, const TerminalProfile& profile);

// Published block distributions (equal-weight components, trimmed to
// their bounds) for the seven mixture blocks.
const std::map<BlockKind, TruncatedMixture>& reference_block_mixtures();

// Components per mixture block when fitting from data: the published counts.
std::map<BlockKind, std::size_t> default_component_counts();

struct FitOptions {
    std::uint64_t seed = 0;
    std::size_t samples_per_iteration = 500;
    std::size_t max_iter = 500;
    unsigned threads = 1;
    std::map<BlockKind, std::size_t> components = default_component_counts();
};

struct BlockFitEntry {
    std::string terminal;
    BlockKind kind = BlockKind::CargoOperation;
    std::size_t n_observations = 0;
    std::string approach;
    std::optional<std::size_t> iterations;
    std::optional<KsResult> ks;
    bool converged = true;
};

struct FitReport {
    std::vector<BlockFitEntry> blocks;
    std::vector<CoverageGap> regression_gaps;
};

// Regression for cargo operation, MDGS mixtures for sampling, tank
// inspection, UBO and arm (dis)connection gaps, proportional constants for
// shifting, prewash and stripping, fixed one hour for the safety meeting.
// A mixture fit that exhausts its budget keeps the best mixture seen and is
// flagged in the report. Blocks with fewer than two observations are left
// out of the registry.
ModelRegistry fit_registry(std::span<const Portcall> training, const std::map<std::string, TerminalProfile>& profiles,
                           const FitOptions& options = {}, FitReport* report = nullptr);

}  // namespace berthstay
