#include "berthstay/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "berthstay/csv.hpp"
#include "berthstay/error.hpp"

namespace berthstay {

Metrics compute_metrics(std::span<const double> errors) {
    if (errors.empty()) throw DomainError("compute_metrics needs at least one error");
    Metrics m;
    m.n = errors.size();
    const double n = static_cast<double>(m.n);
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    m.median = m.n % 2 == 1 ? sorted[m.n / 2] : 0.5 * (sorted[m.n / 2 - 1] + sorted[m.n / 2]);
    double sum = 0.0, sq = 0.0, abs_sum = 0.0;
    for (double e : errors) {
        sum += e;
        sq += e * e;
        abs_sum += std::abs(e);
    }
    m.mean = sum / n;
    m.mse = sq / n;
    m.mae = abs_sum / n;
    if (m.n >= 2) {
        double ss = 0.0;
        for (double e : errors) ss += (e - m.mean) * (e - m.mean);
        m.sigma = std::sqrt(ss / (n - 1.0));
    }
    return m;
}

double within_band(std::span<const double> errors, double h) {
    if (errors.empty()) throw DomainError("within_band needs at least one error");
    if (!(h > 0.0)) throw DomainError("within_band needs a positive band");
    const auto hits = std::count_if(errors.begin(), errors.end(), [h](double e) { return std::abs(e) <= h; });
    return static_cast<double>(hits) / static_cast<double>(errors.size());
}

double weighted_benchmark(const BenchmarkTable& table) {
    double weighted = 0.0;
    std::size_t total = 0;
    for (const auto& e : table) {
        weighted += static_cast<double>(e.count) * e.hours;
        total += e.count;
    }
    if (total == 0) throw DomainError("weighted_benchmark needs a positive total count");
    return weighted / static_cast<double>(total);
}

double accuracy(double mae, double benchmark) {
    if (!(benchmark > 0.0)) throw DomainError("accuracy needs a positive benchmark");
    if (!(mae >= 0.0)) throw DomainError("accuracy needs a non-negative MAE");
    return std::max(0.0, (1.0 - mae / benchmark) * 100.0);
}

std::string_view multiplicity_name(Multiplicity m) { return m == Multiplicity::Single ? "Single" : "Multiple"; }

ScenarioReport evaluate_scenarios(const ModelRegistry& registry, std::span<const Portcall> portcalls,
                                  const PredictOptions& options) {
    ScenarioReport report;
    struct CellState {
        bool any_applicable = false;
        std::vector<double> errors;
    };
    std::map<CellKey, CellState> cells;

    for (const auto& pc : portcalls) {
        if (pc.incomplete) {
            report.skipped.push_back({pc.portcall_id, "no cargo operation"});
            continue;
        }
        const auto end = berth_stay_end(pc);
        JobSpec job;
        try {
            job = job_from_portcall(pc, registry.profile(pc.terminal));
        } catch (const Error& e) {
            report.skipped.push_back({pc.portcall_id, e.what()});
            continue;
        }
        if (!end) {
            report.skipped.push_back({pc.portcall_id, "no arm disconnection"});
            continue;
        }
        PortcallEvaluation pe;
        pe.portcall_id = pc.portcall_id;
        pe.key = {Scenario::S1, pc.terminal, job.shipment,
                  job.cargoes.size() == 1 ? Multiplicity::Single : Multiplicity::Multiple};
        std::vector<std::pair<CellKey, double>> pending;
        bool failed = false;
        for (auto s : all_scenarios()) {
            CellKey key = pe.key;
            key.scenario = s;
            auto& cell = cells[key];
            try {
                const auto pred = predict_berth_stay(registry, job, s, options);
                const auto anchor = scenario_anchor(pc, s);
                cell.any_applicable = true;
                if (!anchor) continue;
                const double actual = hours_between(*anchor, *end);
                const auto i = static_cast<std::size_t>(s) - 1;
                pe.predicted[i] = pred.point_hours;
                pe.actual[i] = actual;
                pending.emplace_back(key, prediction_error(pred.point_hours, actual));
            } catch (const NotApplicable&) {
            } catch (const Error& e) {
                report.skipped.push_back({pc.portcall_id, e.what()});
                failed = true;
                break;
            }
        }
        if (failed) continue;
        for (auto& [key, err] : pending) cells[key].errors.push_back(err);
        report.portcalls.push_back(std::move(pe));
    }

    for (auto& [key, state] : cells) {
        ReportCell cell;
        cell.key = key;
        cell.applicable = state.any_applicable;
        cell.errors = std::move(state.errors);
        if (cell.applicable && !cell.errors.empty()) cell.metrics = compute_metrics(cell.errors);
        report.cells.push_back(std::move(cell));
    }
    return report;
}

void write_report_csv(std::ostream& out, const ScenarioReport& report) {
    out << "scenario,terminal,shipment,multiplicity,median,mean,sigma,mse,mae,n\n";
    for (const auto& c : report.cells) {
        std::vector<std::string> row{std::string(scenario_name(c.key.scenario)), c.key.terminal,
                                     std::string(shipment_name(c.key.shipment)),
                                     std::string(multiplicity_name(c.key.multiplicity))};
        if (!c.applicable) {
            for (int i = 0; i < 6; ++i) row.emplace_back("N.A.");
        } else if (!c.metrics) {
            for (int i = 0; i < 5; ++i) row.emplace_back("");
            row.emplace_back("0");
        } else {
            const auto& m = *c.metrics;
            row.push_back(csv::format_number(m.median));
            row.push_back(csv::format_number(m.mean));
            row.push_back(m.sigma ? csv::format_number(*m.sigma) : "");
            row.push_back(csv::format_number(m.mse));
            row.push_back(csv::format_number(m.mae));
            row.push_back(std::to_string(m.n));
        }
        csv::write_row(out, row);
    }
}

std::vector<HistogramBin> error_histogram(std::span<const double> errors, double width) {
    if (!(width > 0.0)) throw DomainError("histogram bin width must be positive");
    std::vector<HistogramBin> bins;
    if (errors.empty()) return bins;
    const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
    const auto first = static_cast<long long>(std::floor(*lo / width));
    const auto last = static_cast<long long>(std::floor(*hi / width));
    for (long long k = first; k <= last; ++k)
        bins.push_back({static_cast<double>(k) * width, static_cast<double>(k + 1) * width, 0});
    for (double e : errors) ++bins[static_cast<std::size_t>(static_cast<long long>(std::floor(e / width)) - first)].count;
    return bins;
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
    out << "bin_left,bin_right,count\n";
    for (const auto& b : bins) {
        const std::string row[] = {csv::format_number(b.left), csv::format_number(b.right), std::to_string(b.count)};
        csv::write_row(out, row);
    }
}

}  // namespace berthstay
