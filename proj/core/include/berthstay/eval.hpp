#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "berthstay/engine.hpp"

namespace berthstay {

// Signed: predicted - actual.
inline double prediction_error(double predicted, double actual) { return predicted - actual; }

struct Metrics {
    double median = 0.0;
    double mean = 0.0;
    std::optional<double> sigma;  // N-1 divisor; absent when n == 1
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n = 0;
};

// Throws DomainError on an empty vector.
Metrics compute_metrics(std::span<const double> errors);

// Fraction of |error| <= h. DomainError when empty or h <= 0.
double within_band(std::span<const double> errors, double h);

struct BenchmarkEntry {
    std::string segment;
    std::size_t count = 0;
    double hours = 0.0;
};

using BenchmarkTable = std::vector<BenchmarkEntry>;

// Count-weighted mean duration. DomainError when the total count is zero.
double weighted_benchmark(const BenchmarkTable& table);

// (1 - mae/benchmark) * 100, floored at 0. DomainError unless benchmark > 0
// and mae >= 0.
double accuracy(double mae, double benchmark);

enum class Multiplicity : std::uint8_t { Single, Multiple };

std::string_view multiplicity_name(Multiplicity m);

struct CellKey {
    Scenario scenario = Scenario::S1;
    std::string terminal;
    ShipmentType shipment = ShipmentType::Discharging;
    Multiplicity multiplicity = Multiplicity::Single;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct ReportCell {
    CellKey key;
    bool applicable = true;
    std::vector<double> errors;
    std::optional<Metrics> metrics;  // absent for N.A. and empty cells
};

struct PortcallEvaluation {
    std::string portcall_id;
    CellKey key;  // scenario field unused
    std::array<std::optional<double>, 4> predicted;
    std::array<std::optional<double>, 4> actual;
};

struct SkippedPortcall {
    std::string portcall_id;
    std::string reason;
};

struct ScenarioReport {
    std::vector<ReportCell> cells;  // ordered by key
    std::vector<PortcallEvaluation> portcalls;
    std::vector<SkippedPortcall> skipped;
};

// Predicts every scenario for every complete portcall and compares with the
// logged durations (anchor event to final arm disconnection).
ScenarioReport evaluate_scenarios(const ModelRegistry& registry, std::span<const Portcall> portcalls,
                                  const PredictOptions& options = {});

// scenario,terminal,shipment,multiplicity,median,mean,sigma,mse,mae,n
void write_report_csv(std::ostream& out, const ScenarioReport& report);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

inline constexpr double kHistogramBinHours = 0.5;

// Contiguous bins aligned to multiples of the width, covering every value.
std::vector<HistogramBin> error_histogram(std::span<const double> errors, double width = kHistogramBinHours);

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);

}  // namespace berthstay
