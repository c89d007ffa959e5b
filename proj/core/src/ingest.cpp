#include "berthstay/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "berthstay/csv.hpp"

namespace berthstay {
namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::optional<EventKind> exact_event(std::string_view normalized) {
    for (auto kind : all_event_kinds())
        if (normalize_label(event_name(kind)) == normalized) return kind;
    return std::nullopt;
}

std::optional<CargoGrade> exact_grade(std::string_view normalized) {
    for (const auto& g : focused_grades())
        if (normalize_label(g.name) == normalized) return g;
    return std::nullopt;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void load_two_column(std::istream& in, const std::function<void(std::string_view, std::string_view)>& add) {
    std::size_t line_no = 0;
    auto header = csv::next_row(in, line_no);
    if (!header) throw FormatError("alias file is empty");
    while (auto row = csv::next_row(in, line_no)) {
        auto fields = csv::split_line(row->text);
        if (!fields || fields->size() != 2)
            throw FormatError("alias file line " + std::to_string(row->line_number) + ": expected 2 fields");
        add(csv::trim((*fields)[0]), csv::trim((*fields)[1]));
    }
}

}  // namespace

std::string normalize_label(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

void AliasMap::add_event_alias(std::string_view alias, std::string_view canonical_event) {
    auto kind = exact_event(normalize_label(canonical_event));
    if (!kind) throw ConfigError("event alias target '" + std::string(canonical_event) + "' is not a standard event");
    events_[normalize_label(alias)] = *kind;
}

void AliasMap::add_cargo_alias(std::string_view alias, std::string_view canonical_grade) {
    auto grade = exact_grade(normalize_label(canonical_grade));
    if (!grade) throw ConfigError("cargo alias target '" + std::string(canonical_grade) + "' is not a focused grade");
    cargo_[normalize_label(alias)] = std::string(grade->name);
}

void AliasMap::load_event_aliases(std::istream& in) {
    load_two_column(in, [this](std::string_view a, std::string_view c) { add_event_alias(a, c); });
}

void AliasMap::load_cargo_aliases(std::istream& in) {
    load_two_column(in, [this](std::string_view a, std::string_view c) { add_cargo_alias(a, c); });
}

UnknownEvent::UnknownEvent(std::string label, std::vector<std::string> suggestions)
    : Error([&] {
          std::string msg = "unknown event '" + label + "'";
          if (!suggestions.empty()) {
              msg += "; closest: ";
              for (std::size_t i = 0; i < suggestions.size(); ++i) {
                  if (i) msg += ", ";
                  msg += suggestions[i];
              }
          }
          return msg;
      }()),
      label_(std::move(label)),
      suggestions_(std::move(suggestions)) {}

EventKind standardize_event(std::string_view label, const AliasMap& aliases) {
    const std::string key = normalize_label(label);
    if (key.empty()) throw DomainError("event label is empty");
    if (auto kind = exact_event(key)) return *kind;
    if (auto it = aliases.event_aliases().find(key); it != aliases.event_aliases().end()) return it->second;

    std::vector<std::pair<std::size_t, EventKind>> ranked;
    for (auto kind : all_event_kinds()) ranked.emplace_back(edit_distance(key, normalize_label(event_name(kind))), kind);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> suggestions;
    for (std::size_t i = 0; i < 3 && i < ranked.size(); ++i)
        suggestions.emplace_back(event_name(ranked[i].second));
    throw UnknownEvent(csv::trim(label), std::move(suggestions));
}

CargoRef standardize_cargo(std::string_view label, const AliasMap& aliases) {
    const std::string trimmed = csv::trim(label);
    const std::string key = normalize_label(trimmed);
    if (key.empty()) throw DomainError("cargo label is empty");

    auto canonical = [](std::string_view name, CargoGroup group) {
        return CargoRef{std::string(name), group, std::string(name), false};
    };
    if (auto it = aliases.cargo_aliases().find(key); it != aliases.cargo_aliases().end())
        return canonical(it->second, *grade_group(it->second));
    if (auto g = exact_grade(key)) return canonical(g->name, g->group);

    // Typo patterns: "150" -> "150N", "N150" -> "150N".
    std::optional<std::string> candidate;
    if (all_digits(key))
        candidate = key + "n";
    else if (key.size() > 1 && key.front() == 'n' && all_digits(std::string_view(key).substr(1)))
        candidate = key.substr(1) + "n";
    if (candidate) {
        if (auto g = exact_grade(*candidate))
            return CargoRef{std::string(g->name), g->group, trimmed, true};
    }
    return CargoRef{trimmed, CargoGroup::Other, trimmed, false};
}

ParsedLog parse_log(std::istream& in, const AliasMap& aliases) {
    ParsedLog out;
    std::size_t line_no = 0;
    auto header = csv::next_row(in, line_no);
    if (!header) throw FormatError("event log is empty; expected header: " + std::string(kLogHeader));
    {
        auto fields = csv::split_line(header->text);
        std::string joined;
        if (fields)
            for (std::size_t i = 0; i < fields->size(); ++i) joined += (i ? "," : "") + csv::trim((*fields)[i]);
        if (joined != kLogHeader)
            throw FormatError("missing or unexpected header; expected: " + std::string(kLogHeader));
    }

    auto reject = [&](std::size_t line, std::string reason) {
        ++out.report.rejected;
        out.report.rejections.push_back({line, std::move(reason)});
    };

    while (auto row = csv::next_row(in, line_no)) {
        auto fields = csv::split_line(row->text);
        if (!fields) {
            reject(row->line_number, "unterminated quoted field");
            continue;
        }
        if (fields->size() != 11) {
            reject(row->line_number, "expected 11 fields, found " + std::to_string(fields->size()));
            continue;
        }
        std::vector<std::string> f;
        for (auto& s : *fields) f.push_back(csv::trim(s));

        StandardRecord rec;
        rec.portcall_id = f[0];
        rec.terminal = f[1];
        if (rec.portcall_id.empty()) {
            reject(row->line_number, "missing portcall_id");
            continue;
        }
        if (f[5].empty()) {
            reject(row->line_number, "missing event");
            continue;
        }
        try {
            rec.event = standardize_event(f[5], aliases);
        } catch (const UnknownEvent& e) {
            reject(row->line_number, e.what());
            continue;
        }
        const auto ts = parse_timestamp(f[6]);
        if (!ts.value) {
            switch (ts.error) {
                case TimestampParseError::InvalidDate: reject(row->line_number, "invalid calendar date"); break;
                case TimestampParseError::InvalidTime: reject(row->line_number, "invalid time of day"); break;
                case TimestampParseError::Malformed: reject(row->line_number, "malformed timestamp '" + f[6] + "'"); break;
            }
            continue;
        }
        rec.timestamp = *ts.value;
        const auto shipment = shipment_from_name(f[9]);
        if (!shipment) {
            reject(row->line_number, "unknown shipment type '" + f[9] + "'");
            continue;
        }
        rec.shipment = *shipment;

        if (event_type(rec.event) == EventType::Cargo) {
            if (f[7].empty()) {
                reject(row->line_number, "cargo event missing cargo");
                continue;
            }
            if (f[8].empty()) {
                reject(row->line_number, "cargo event missing size");
                continue;
            }
            const auto size = parse_double(f[8]);
            if (!size) {
                reject(row->line_number, "invalid size_mt '" + f[8] + "'");
                continue;
            }
            if (*size < 0) {
                reject(row->line_number, "negative size_mt");
                continue;
            }
            rec.cargo = standardize_cargo(f[7], aliases);
            rec.size_mt = *size;
            if (!f[10].empty()) {
                const auto arm = parse_int(f[10]);
                if (!arm) {
                    reject(row->line_number, "invalid arm_id '" + f[10] + "'");
                    continue;
                }
                rec.arm_id = *arm;
            }
        }

        if (!out.vessels.contains(rec.portcall_id) && !(f[2].empty() && f[3].empty() && f[4].empty())) {
            VesselIdentity v;
            v.name = f[2];
            v.imo = f[3];
            v.mmsi = f[4];
            out.vessels.emplace(rec.portcall_id, std::move(v));
        }
        ++out.report.accepted;
        out.records.push_back(std::move(rec));
    }
    return out;
}

void write_log(std::ostream& out, std::span<const Portcall> portcalls) {
    out << kLogHeader << '\n';
    for (const auto& pc : portcalls) {
        for (const auto& r : pc.records) {
            const std::string fields[] = {
                r.portcall_id,
                r.terminal,
                pc.vessel ? pc.vessel->name : std::string{},
                pc.vessel ? pc.vessel->imo : std::string{},
                pc.vessel ? pc.vessel->mmsi : std::string{},
                std::string(event_name(r.event)),
                r.timestamp.to_string(),
                r.cargo ? r.cargo->recorded_label : std::string{},
                r.size_mt ? csv::format_number(*r.size_mt) : std::string{},
                std::string(shipment_name(r.shipment)),
                r.arm_id ? std::to_string(*r.arm_id) : std::string{},
            };
            csv::write_row(out, fields);
        }
    }
}

std::vector<Portcall> assemble_portcalls(std::vector<StandardRecord> records,
                                         const std::map<std::string, VesselIdentity>& vessels) {
    std::vector<Portcall> out;
    std::unordered_map<std::string, std::size_t> index;
    for (auto& r : records) {
        auto [it, inserted] = index.try_emplace(r.portcall_id, out.size());
        if (inserted) {
            Portcall pc;
            pc.portcall_id = r.portcall_id;
            pc.terminal = r.terminal;
            if (auto v = vessels.find(r.portcall_id); v != vessels.end()) pc.vessel = v->second;
            out.push_back(std::move(pc));
        }
        out[it->second].records.push_back(std::move(r));
    }
    for (auto& pc : out) refresh_portcall(pc);
    return out;
}

namespace {

void add_split(SplitCounts& s, std::optional<OperationMode> mode, std::size_t amount = 1) {
    s.total += amount;
    if (!mode) return;
    switch (*mode) {
        case OperationMode::Single: s.single += amount; break;
        case OperationMode::Sequential:
            s.multiple += amount;
            s.sequential += amount;
            break;
        case OperationMode::Concurrent:
            s.multiple += amount;
            s.concurrent += amount;
            break;
    }
}

void accumulate(TerminalStatistics& t, const Portcall& pc) {
    const bool loading = pc.shipment() == ShipmentType::Loading;
    ++t.portcalls;
    ++(loading ? t.portcalls_loading : t.portcalls_discharging);

    const auto ops = operation_intervals(pc.records);
    bool focused = false;
    for (const auto& op : ops) {
        ++t.operations;
        const bool is_focused = op.cargo.group != CargoGroup::Other;
        focused = focused || is_focused;
        if (loading) {
            ++t.ops_loading;
            ++(is_focused ? t.ops_loading_focused : t.ops_loading_other);
        } else {
            ++t.ops_discharging;
            ++(is_focused ? t.ops_discharging_focused : t.ops_discharging_other);
        }
        if (op.cargo.group == CargoGroup::G1) add_split(loading ? t.ops_loading_g1 : t.ops_discharging_g1, pc.operation_mode);
        if (op.cargo.group == CargoGroup::G2) add_split(loading ? t.ops_loading_g2 : t.ops_discharging_g2, pc.operation_mode);
    }
    if (focused) add_split(loading ? t.portcalls_loading_focused : t.portcalls_discharging_focused, pc.operation_mode);
}

void add_stats(TerminalStatistics& into, const TerminalStatistics& from) {
    auto add = [](SplitCounts& a, const SplitCounts& b) {
        a.total += b.total;
        a.single += b.single;
        a.multiple += b.multiple;
        a.sequential += b.sequential;
        a.concurrent += b.concurrent;
    };
    into.portcalls += from.portcalls;
    into.portcalls_loading += from.portcalls_loading;
    into.portcalls_discharging += from.portcalls_discharging;
    add(into.portcalls_loading_focused, from.portcalls_loading_focused);
    add(into.portcalls_discharging_focused, from.portcalls_discharging_focused);
    into.operations += from.operations;
    into.ops_loading += from.ops_loading;
    into.ops_loading_focused += from.ops_loading_focused;
    into.ops_loading_other += from.ops_loading_other;
    into.ops_discharging += from.ops_discharging;
    into.ops_discharging_focused += from.ops_discharging_focused;
    into.ops_discharging_other += from.ops_discharging_other;
    add(into.ops_loading_g1, from.ops_loading_g1);
    add(into.ops_loading_g2, from.ops_loading_g2);
    add(into.ops_discharging_g1, from.ops_discharging_g1);
    add(into.ops_discharging_g2, from.ops_discharging_g2);
}

}  // namespace

StatisticsTable data_statistics(std::span<const Portcall> portcalls) {
    std::map<std::string, TerminalStatistics> by_terminal;
    for (const auto& pc : portcalls) {
        auto& t = by_terminal[pc.terminal];
        t.terminal = pc.terminal;
        accumulate(t, pc);
    }
    StatisticsTable table;
    table.all.terminal = "All";
    for (auto& [name, t] : by_terminal) {
        add_stats(table.all, t);
        table.terminals.push_back(std::move(t));
    }
    return table;
}

std::vector<StatisticsRow> StatisticsTable::rows() const {
    std::vector<const TerminalStatistics*> cols;
    for (const auto& t : terminals) cols.push_back(&t);
    cols.push_back(&all);

    std::vector<StatisticsRow> out;
    auto row = [&](std::string label, auto get) {
        StatisticsRow r{std::move(label), {}};
        for (const auto* c : cols) r.values.push_back(get(*c));
        out.push_back(std::move(r));
    };
    auto split = [&](const std::string& label, SplitCounts TerminalStatistics::*member) {
        row(label, [member](const TerminalStatistics& t) { return (t.*member).total; });
        row(label + " - Single", [member](const TerminalStatistics& t) { return (t.*member).single; });
        row(label + " - Multiple", [member](const TerminalStatistics& t) { return (t.*member).multiple; });
        row(label + " - Multiple - Sequential", [member](const TerminalStatistics& t) { return (t.*member).sequential; });
        row(label + " - Multiple - Concurrent", [member](const TerminalStatistics& t) { return (t.*member).concurrent; });
    };
    using T = TerminalStatistics;
    row("Portcall", [](const T& t) { return t.portcalls; });
    row("Portcall - Loading (All)", [](const T& t) { return t.portcalls_loading; });
    row("Portcall - Discharging (All)", [](const T& t) { return t.portcalls_discharging; });
    split("Portcall - Loading (G1, G2)", &T::portcalls_loading_focused);
    split("Portcall - Discharging (G1, G2)", &T::portcalls_discharging_focused);
    row("Operation", [](const T& t) { return t.operations; });
    row("Operation - Loading (All)", [](const T& t) { return t.ops_loading; });
    row("Operation - Loading (All) - Focused", [](const T& t) { return t.ops_loading_focused; });
    row("Operation - Loading (All) - Other", [](const T& t) { return t.ops_loading_other; });
    row("Operation - Discharging (All)", [](const T& t) { return t.ops_discharging; });
    row("Operation - Discharging (All) - Focused", [](const T& t) { return t.ops_discharging_focused; });
    row("Operation - Discharging (All) - Other", [](const T& t) { return t.ops_discharging_other; });
    split("Operation - Loading (G1)", &T::ops_loading_g1);
    split("Operation - Loading (G2)", &T::ops_loading_g2);
    split("Operation - Discharging (G1)", &T::ops_discharging_g1);
    split("Operation - Discharging (G2)", &T::ops_discharging_g2);
    return out;
}

void write_statistics_csv(std::ostream& out, const StatisticsTable& table) {
    std::vector<std::string> header{"item"};
    for (const auto& t : table.terminals) header.push_back(t.terminal);
    header.push_back("All");
    csv::write_row(out, header);
    for (const auto& r : table.rows()) {
        std::vector<std::string> fields{r.label};
        for (auto v : r.values) fields.push_back(std::to_string(v));
        csv::write_row(out, fields);
    }
}

}  // namespace berthstay
