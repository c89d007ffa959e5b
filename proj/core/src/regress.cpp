#include "berthstay/regress.hpp"

#include <algorithm>

#include "berthstay/error.hpp"

namespace berthstay {

std::string to_string(const RegressionKey& key) {
    return key.terminal + "/" + std::string(group_name(key.group)) + "/" + std::string(shipment_name(key.shipment));
}

LinearModel fit_linear(std::span<const SizeDuration> points) {
    if (points.size() < 2) throw InsufficientData("fit_linear needs at least 2 points, got " + std::to_string(points.size()));
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        if (p.size_mt < 0.0) throw DomainError("fit_linear: negative cargo size");
        mx += p.size_mt;
        my += p.hours;
    }
    mx /= n;
    my /= n;
    // Centred form of the normal equations: same solution, no cancellation
    // from the raw sum of squares.
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.size_mt - mx) * (p.size_mt - mx);
        sxy += (p.size_mt - mx) * (p.hours - my);
    }
    const bool all_equal = std::all_of(points.begin(), points.end(),
                                       [&](const SizeDuration& p) { return p.size_mt == points.front().size_mt; });
    if (all_equal || sxx == 0.0) throw SingularDesign("fit_linear: all cargo sizes are equal");
    LinearModel m;
    m.a = sxy / sxx;
    m.b = my - m.a * mx;
    m.n_train = points.size();
    return m;
}

double predict_duration(const LinearModel& model, double size_mt, double floor) {
    if (size_mt < 0.0) throw DomainError("predict_duration: negative cargo size");
    return std::max(model.a * size_mt + model.b, floor);
}

std::map<RegressionKey, std::vector<SizeDuration>> operation_points(std::span<const Portcall> portcalls) {
    std::map<RegressionKey, std::vector<SizeDuration>> out;
    for (const auto& pc : portcalls) {
        if (pc.incomplete || pc.records.empty()) continue;
        for (const auto& op : operation_intervals(pc.records)) {
            RegressionKey key{pc.terminal, op.cargo.group, pc.shipment()};
            out[key].push_back({op.size_mt, op.hours()});
        }
    }
    return out;
}

CatalogFit fit_catalog(std::span<const Portcall> portcalls) {
    CatalogFit result;
    for (auto& [key, points] : operation_points(portcalls)) {
        try {
            auto model = fit_linear(points);
            model.key = key;
            result.catalog.emplace(key, model);
        } catch (const InsufficientData& e) {
            result.gaps.push_back({key, points.size(), e.what()});
        } catch (const SingularDesign& e) {
            result.gaps.push_back({key, points.size(), e.what()});
        }
    }
    return result;
}

}  // namespace berthstay
