#include "berthstay/serialization.hpp"

#include "berthstay/error.hpp"

namespace berthstay::json {
namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, std::string_view what) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(std::string(what) + ": field '" + key + "' has the wrong type");
    }
}

CargoGroup group_field(const nlohmann::json& j, const char* key, std::string_view what) {
    auto g = group_from_name(field<std::string>(j, key, what));
    if (!g) throw FormatError(std::string(what) + ": unknown cargo group");
    return *g;
}

ShipmentType shipment_field(const nlohmann::json& j, std::string_view what) {
    auto s = shipment_from_name(field<std::string>(j, "shipment", what));
    if (!s) throw FormatError(std::string(what) + ": unknown shipment type");
    return *s;
}

BlockKind block_field(const nlohmann::json& j, std::string_view what) {
    auto b = block_from_name(field<std::string>(j, "block", what));
    if (!b) throw FormatError(std::string(what) + ": unknown block");
    return *b;
}

std::string element_label(const std::vector<BlockKind>& blocks) {
    std::string out;
    for (auto k : blocks) {
        if (!out.empty()) out += "+";
        out += block_name(k);
    }
    return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

nlohmann::json parse(std::string_view text, std::string_view what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

Json to_json(const TruncatedMixture& mix) {
    Json comps = Json::array();
    for (const auto& c : mix.components) comps.push_back({{"mu", c.mu}, {"sigma", c.sigma}});
    return Json{{"components", comps}, {"weights", mix.weights}, {"lb", mix.lb}, {"ub", mix.ub}};
}

TruncatedMixture mixture_from_json(const nlohmann::json& j) {
    constexpr std::string_view what = "mixture";
    TruncatedMixture m;
    const auto comps = field<nlohmann::json>(j, "components", what);
    if (!comps.is_array()) throw FormatError("mixture: components must be an array");
    for (const auto& c : comps) m.components.push_back({field<double>(c, "mu", what), field<double>(c, "sigma", what)});
    if (j.contains("weights"))
        m.weights = field<std::vector<double>>(j, "weights", what);
    else
        m.weights.assign(m.components.size(), m.components.empty() ? 0.0 : 1.0 / static_cast<double>(m.components.size()));
    m.lb = field<double>(j, "lb", what);
    m.ub = field<double>(j, "ub", what);
    try {
        m.validate();
    } catch (const ConfigError& e) {
        throw FormatError(std::string("mixture: ") + e.what());
    }
    return m;
}

Json to_json(const RegressionCatalog& catalog) {
    Json out = Json::array();
    for (const auto& [key, m] : catalog)
        out.push_back({{"terminal", key.terminal},
                       {"group", std::string(group_name(key.group))},
                       {"shipment", std::string(shipment_name(key.shipment))},
                       {"a", m.a},
                       {"b", m.b},
                       {"n_train", m.n_train}});
    return out;
}

RegressionCatalog catalog_from_json(const nlohmann::json& j) {
    constexpr std::string_view what = "regression catalog";
    if (!j.is_array()) throw FormatError("regression catalog must be an array");
    RegressionCatalog out;
    for (const auto& e : j) {
        RegressionKey key{field<std::string>(e, "terminal", what), group_field(e, "group", what),
                          shipment_field(e, what)};
        out[key] = LinearModel{field<double>(e, "a", what), field<double>(e, "b", what),
                               field<std::size_t>(e, "n_train", what), key};
    }
    return out;
}

Json to_json(const TerminalProfile& p) {
    Json blocks = Json::array();
    for (auto k : p.observed_blocks) blocks.push_back(std::string(block_name(k)));
    Json prewash = Json::object();
    for (const auto& [g, v] : p.prewash_policy) prewash[std::string(group_name(g))] = v;
    return Json{{"name", p.name},
                {"observed_blocks", blocks},
                {"supports_sampling", p.supports_sampling},
                {"records_surveyor", p.records_surveyor},
                {"prewash", prewash},
                {"tank_inspection", p.tank_inspection == TankInspectionPosition::AfterSafetyMeeting
                                        ? "after_safety_meeting"
                                        : "before_arm_disconnection"}};
}

TerminalProfile profile_from_json(const nlohmann::json& j) {
    constexpr std::string_view what = "terminal profile";
    TerminalProfile p;
    p.name = field<std::string>(j, "name", what);
    for (const auto& b : field<std::vector<std::string>>(j, "observed_blocks", what)) {
        auto k = block_from_name(b);
        if (!k) throw FormatError("terminal profile: unknown block '" + b + "'");
        p.observed_blocks.insert(*k);
    }
    p.supports_sampling = field<bool>(j, "supports_sampling", what);
    p.records_surveyor = j.contains("records_surveyor") ? field<bool>(j, "records_surveyor", what) : true;
    const auto prewash = field<nlohmann::json>(j, "prewash", what);
    if (!prewash.is_object()) throw FormatError("terminal profile: 'prewash' must be an object");
    for (auto it = prewash.begin(); it != prewash.end(); ++it) {
        auto group = group_from_name(it.key());
        if (!group || !it.value().is_boolean())
            throw FormatError("terminal profile: bad prewash entry '" + it.key() + "'");
        p.prewash_policy[*group] = it.value().get<bool>();
    }
    if (j.contains("tank_inspection")) {
        const auto pos = field<std::string>(j, "tank_inspection", what);
        if (pos == "after_safety_meeting")
            p.tank_inspection = TankInspectionPosition::AfterSafetyMeeting;
        else if (pos == "before_arm_disconnection")
            p.tank_inspection = TankInspectionPosition::BeforeArmDisconnection;
        else
            throw FormatError("terminal profile: unknown tank_inspection position '" + pos + "'");
    }
    return p;
}

Json to_json(const ModelRegistry& reg) {
    Json profiles = Json::array();
    for (const auto& [name, p] : reg.profiles) profiles.push_back(to_json(p));
    Json blocks = Json::array();
    for (const auto& [key, model] : reg.blocks) {
        Json b{{"terminal", key.first}, {"block", std::string(block_name(key.second))}};
        std::visit(
            [&](const auto& a) {
                using A = std::decay_t<decltype(a)>;
                if constexpr (std::is_same_v<A, RegressionApproach>) {
                    b["approach"] = "regression";
                } else if constexpr (std::is_same_v<A, MixtureApproach>) {
                    b["approach"] = "mixture";
                    b["mixture"] = to_json(a.mixture);
                } else if constexpr (std::is_same_v<A, ProportionalApproach>) {
                    b["approach"] = "proportional";
                    b["unit_hours"] = a.unit_hours;
                } else {
                    b["approach"] = "fixed";
                    b["hours"] = a.hours;
                }
            },
            model.approach);
        blocks.push_back(std::move(b));
    }
    return Json{{"duration_floor", reg.duration_floor},
                {"profiles", profiles},
                {"catalog", to_json(reg.catalog)},
                {"blocks", blocks}};
}

ModelRegistry registry_from_json(const nlohmann::json& j) {
    constexpr std::string_view what = "model registry";
    ModelRegistry reg;
    if (j.contains("duration_floor")) reg.duration_floor = field<double>(j, "duration_floor", what);
    for (const auto& p : field<nlohmann::json>(j, "profiles", what)) {
        auto profile = profile_from_json(p);
        reg.profiles[profile.name] = std::move(profile);
    }
    reg.catalog = catalog_from_json(field<nlohmann::json>(j, "catalog", what));
    for (const auto& b : field<nlohmann::json>(j, "blocks", what)) {
        const auto terminal = field<std::string>(b, "terminal", what);
        const auto kind = block_field(b, what);
        const auto approach = field<std::string>(b, "approach", what);
        BlockModel m{kind, RegressionApproach{}};
        if (approach == "regression")
            m.approach = RegressionApproach{};
        else if (approach == "mixture")
            m.approach = MixtureApproach{mixture_from_json(field<nlohmann::json>(b, "mixture", what))};
        else if (approach == "proportional")
            m.approach = ProportionalApproach{field<double>(b, "unit_hours", what)};
        else if (approach == "fixed")
            m.approach = FixedApproach{field<double>(b, "hours", what)};
        else
            throw FormatError("model registry: unknown approach '" + approach + "'");
        reg.blocks[{terminal, kind}] = std::move(m);
    }
    return reg;
}

Json to_json(const Prediction& p) {
    Json per_block = Json::object();
    for (const auto& c : p.per_block) per_block[element_label(c.blocks)] = c.hours;
    Json out{{"scenario", std::string(scenario_name(p.scenario))}, {"point_hours", p.point_hours},
             {"per_block", per_block}};
    if (p.samples)
        out["quantiles"] = {{"p10", *p.quantile(0.1)}, {"p50", *p.quantile(0.5)}, {"p90", *p.quantile(0.9)}};
    else
        out["quantiles"] = nullptr;
    return out;
}

Json to_json(const ScenarioReport& r) {
    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json cell{{"scenario", std::string(scenario_name(c.key.scenario))},
                  {"terminal", c.key.terminal},
                  {"shipment", std::string(shipment_name(c.key.shipment))},
                  {"multiplicity", std::string(multiplicity_name(c.key.multiplicity))}};
        if (!c.applicable) {
            cell["status"] = "N.A.";
        } else if (!c.metrics) {
            cell["status"] = "empty";
            cell["n"] = 0;
        } else {
            const auto& m = *c.metrics;
            cell["status"] = "ok";
            cell["median"] = m.median;
            cell["mean"] = m.mean;
            cell["sigma"] = optional_number(m.sigma);
            cell["mse"] = m.mse;
            cell["mae"] = m.mae;
            cell["n"] = m.n;
        }
        cells.push_back(std::move(cell));
    }
    Json skipped = Json::array();
    for (const auto& s : r.skipped) skipped.push_back({{"portcall_id", s.portcall_id}, {"reason", s.reason}});
    return Json{{"cells", cells}, {"evaluated_portcalls", r.portcalls.size()}, {"skipped", skipped}};
}

Json to_json(const FitReport& r) {
    Json blocks = Json::array();
    for (const auto& e : r.blocks) {
        Json b{{"terminal", e.terminal},
               {"block", std::string(block_name(e.kind))},
               {"n_observations", e.n_observations},
               {"approach", e.approach},
               {"converged", e.converged}};
        if (e.iterations) b["iterations"] = *e.iterations;
        if (e.ks) b["ks"] = {{"d", e.ks->d}, {"d_crit", e.ks->d_crit}, {"p", e.ks->p}};
        blocks.push_back(std::move(b));
    }
    Json gaps = Json::array();
    for (const auto& g : r.regression_gaps)
        gaps.push_back({{"terminal", g.key.terminal},
                        {"group", std::string(group_name(g.key.group))},
                        {"shipment", std::string(shipment_name(g.key.shipment))},
                        {"n_points", g.n_points},
                        {"reason", g.reason}});
    return Json{{"blocks", blocks}, {"regression_gaps", gaps}};
}

Json to_json(std::span<const TruthEntry> truth) {
    Json out = Json::array();
    for (const auto& t : truth) {
        Json blocks = Json::array();
        for (const auto& [k, h] : t.blocks) blocks.push_back({{"block", std::string(block_name(k))}, {"hours", h}});
        Json ops = Json::array();
        for (const auto& o : t.operations) ops.push_back({{"cargo", o.cargo}, {"size_mt", o.size_mt}, {"hours", o.hours}});
        out.push_back({{"portcall_id", t.portcall_id}, {"blocks", blocks}, {"operations", ops}});
    }
    return out;
}

Json to_json(std::span<const Corruption> manifest) {
    Json out = Json::array();
    for (const auto& c : manifest)
        out.push_back({{"portcall_id", c.portcall_id},
                       {"record_index", c.record_index},
                       {"class", std::string(violation_class_name(c.cls))},
                       {"before", c.before},
                       {"after", c.after}});
    return out;
}

}  // namespace berthstay::json
