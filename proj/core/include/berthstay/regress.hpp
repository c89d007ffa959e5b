#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "berthstay/vocabulary.hpp"

namespace berthstay {

struct RegressionKey {
    std::string terminal;
    CargoGroup group = CargoGroup::Other;
    ShipmentType shipment = ShipmentType::Loading;

    friend auto operator<=>(const RegressionKey&, const RegressionKey&) = default;
};

std::string to_string(const RegressionKey& key);

struct SizeDuration {
    double size_mt = 0.0;
    double hours = 0.0;
};

// duration = a * size + b
struct LinearModel {
    double a = 0.0;  // hours per metric ton
    double b = 0.0;  // hours
    std::size_t n_train = 0;
    RegressionKey key;
};

inline constexpr double kDefaultDurationFloor = 0.1;

// Least squares through the 2x2 normal equations. Throws InsufficientData
// below two points and SingularDesign when every size is the same.
LinearModel fit_linear(std::span<const SizeDuration> points);

// max(a*size + b, floor). Negative size is a DomainError.
double predict_duration(const LinearModel& model, double size_mt, double floor = kDefaultDurationFloor);

using RegressionCatalog = std::map<RegressionKey, LinearModel>;

struct CoverageGap {
    RegressionKey key;
    std::size_t n_points = 0;
    std::string reason;
};

struct CatalogFit {
    RegressionCatalog catalog;
    std::vector<CoverageGap> gaps;
};

// Per-cargo operation durations grouped by (terminal, group, shipment).
std::map<RegressionKey, std::vector<SizeDuration>> operation_points(std::span<const Portcall> portcalls);

// Portcalls marked incomplete are skipped.
CatalogFit fit_catalog(std::span<const Portcall> portcalls);

}  // namespace berthstay
