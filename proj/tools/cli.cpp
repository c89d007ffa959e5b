#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "berthstay/clean.hpp"
#include "berthstay/csv.hpp"
#include "berthstay/engine.hpp"
#include "berthstay/error.hpp"
#include "berthstay/eval.hpp"
#include "berthstay/ingest.hpp"
#include "berthstay/serialization.hpp"
#include "berthstay/synth.hpp"

namespace berthstay::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stream used for injected errors, kept apart from the generation substreams.
constexpr std::uint64_t kInjectionStream = 0x1A7EC7;

struct RunConfig {
    std::string command;
    std::string input;
    std::string out;
    std::string models;
    std::string profiles;
    std::string aliases_events;
    std::string aliases_cargo;
    std::string truth_out;
    std::string manifest_out;
    std::string audit_out;
    std::string discarded_out;
    std::string rejections_out;
    std::string json_out;
    std::string report_out;
    std::optional<std::uint64_t> seed;
    std::string terminal;
    std::string scenario = "all";
    std::string mode = "expectation";
    std::size_t count = 100;
    double cargo_error_rate = 0.0;
    double event_error_rate = 0.0;
    double timing_error_rate = 0.0;
    double max_discard = 1.0;
    double gap_days = 7.0;
    unsigned threads = 1;
};

std::string read_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing required path: ") + what);
    if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(std::string(what) + " cannot be opened: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty()) throw UsageError("missing required output path");
    const fs::path target(path);
    if (target.has_parent_path() && !fs::is_directory(target.parent_path()))
        throw UsageError("output directory not found: " + target.parent_path().string());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw UsageError("cannot write: " + tmp.string());
        o << content;
        if (!o.flush()) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

template <class Fn>
void write_with(const std::string& path, Fn&& fn) {
    std::ostringstream ss;
    fn(ss);
    write_atomic(path, ss.str());
}

void write_json(const std::string& path, const json::Json& j) { write_atomic(path, j.dump(2) + "\n"); }

// --config JSON values take precedence over flags.
void apply_config(RunConfig& cfg, const std::string& path) {
    const auto j = json::parse(read_file(path, "config file"), "config file");
    if (!j.is_object()) throw UsageError("config file must hold a JSON object: " + path);
    for (const auto& [raw_key, v] : j.items()) {
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '-', '_');
        auto str = [&]() {
            if (!v.is_string()) throw UsageError("config key '" + raw_key + "' must be a string");
            return v.get<std::string>();
        };
        auto num = [&]() {
            if (!v.is_number()) throw UsageError("config key '" + raw_key + "' must be a number");
            return v.get<double>();
        };
        auto count = [&]() {
            if (!v.is_number_unsigned()) throw UsageError("config key '" + raw_key + "' must be a non-negative integer");
            return v.get<std::uint64_t>();
        };
        if (key == "input" || key == "data") cfg.input = str();
        else if (key == "out") cfg.out = str();
        else if (key == "models") cfg.models = str();
        else if (key == "profiles") cfg.profiles = str();
        else if (key == "aliases_events") cfg.aliases_events = str();
        else if (key == "aliases_cargo") cfg.aliases_cargo = str();
        else if (key == "truth") cfg.truth_out = str();
        else if (key == "manifest") cfg.manifest_out = str();
        else if (key == "audit") cfg.audit_out = str();
        else if (key == "discarded") cfg.discarded_out = str();
        else if (key == "rejections") cfg.rejections_out = str();
        else if (key == "json") cfg.json_out = str();
        else if (key == "report") cfg.report_out = str();
        else if (key == "seed") cfg.seed = count();
        else if (key == "terminal") cfg.terminal = str();
        else if (key == "scenario") cfg.scenario = v.is_number() ? std::to_string(count()) : str();
        else if (key == "mode") cfg.mode = str();
        else if (key == "count") cfg.count = count();
        else if (key == "cargo_error_rate") cfg.cargo_error_rate = num();
        else if (key == "event_error_rate") cfg.event_error_rate = num();
        else if (key == "timing_error_rate") cfg.timing_error_rate = num();
        else if (key == "error_rate") cfg.cargo_error_rate = cfg.event_error_rate = cfg.timing_error_rate = num();
        else if (key == "max_discard") cfg.max_discard = num();
        else if (key == "gap_days") cfg.gap_days = num();
        else if (key == "threads") cfg.threads = static_cast<unsigned>(count());
        else throw UsageError("unknown config key '" + raw_key + "'");
    }
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed) throw UsageError("command '" + cfg.command + "' is stochastic and needs --seed");
    return *cfg.seed;
}

PredictOptions predict_options(const RunConfig& cfg) {
    PredictOptions o;
    o.threads = cfg.threads;
    if (cfg.mode == "expectation") return o;
    if (cfg.mode.rfind("mc:", 0) == 0) {
        const auto digits = std::string_view(cfg.mode).substr(3);
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && p == digits.data() + digits.size() && n > 0) {
            o.mc_count = n;
            o.seed = require_seed(cfg);
            return o;
        }
    }
    throw UsageError("--mode must be 'expectation' or 'mc:N' with N > 0, got '" + cfg.mode + "'");
}

std::vector<Scenario> scenarios(const RunConfig& cfg) {
    if (cfg.scenario == "all") return {all_scenarios().begin(), all_scenarios().end()};
    auto s = scenario_from_name(cfg.scenario);
    if (!s) throw UsageError("--scenario must be 1, 2, 3, 4 or all, got '" + cfg.scenario + "'");
    return {*s};
}

AliasMap load_aliases(const RunConfig& cfg) {
    AliasMap aliases;
    if (!cfg.aliases_events.empty()) {
        std::istringstream in(read_file(cfg.aliases_events, "event alias file"));
        aliases.load_event_aliases(in);
    }
    if (!cfg.aliases_cargo.empty()) {
        std::istringstream in(read_file(cfg.aliases_cargo, "cargo alias file"));
        aliases.load_cargo_aliases(in);
    }
    return aliases;
}

std::map<std::string, TerminalProfile> load_profiles(const RunConfig& cfg) {
    if (cfg.profiles.empty()) return {{"A", default_profile_a()}, {"B", default_profile_b()}};
    const auto j = json::parse(read_file(cfg.profiles, "profiles file"), "profiles file");
    if (!j.is_array()) throw FormatError("profiles file must hold a JSON array");
    std::map<std::string, TerminalProfile> out;
    for (const auto& p : j) {
        auto profile = json::profile_from_json(p);
        out[profile.name] = std::move(profile);
    }
    return out;
}

struct LoadedLog {
    std::vector<Portcall> portcalls;
    IngestReport report;
};

LoadedLog load_log(const RunConfig& cfg, std::ostream& err) {
    std::istringstream in(read_file(cfg.input, "input file"));
    auto parsed = parse_log(in, load_aliases(cfg));
    if (parsed.report.rejected > 0)
        err << "warning: " << parsed.report.rejected << " row(s) rejected while reading " << cfg.input << "\n";
    auto portcalls = assemble_portcalls(std::move(parsed.records), parsed.vessels);
    if (!cfg.terminal.empty())
        std::erase_if(portcalls, [&](const Portcall& pc) { return pc.terminal != cfg.terminal; });
    return {std::move(portcalls), std::move(parsed.report)};
}

ModelRegistry load_models(const RunConfig& cfg) {
    return json::registry_from_json(json::parse(read_file(cfg.models, "models file"), "models file"));
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    const auto seed = require_seed(cfg);
    auto truth = default_ground_truth();
    if (!cfg.terminal.empty()) {
        std::erase_if(truth.terminals, [&](const TerminalTruth& t) { return t.profile.name != cfg.terminal; });
        if (truth.terminals.empty()) throw UsageError("unknown terminal '" + cfg.terminal + "' (expected A or B)");
    }
    truth.error_rates = {cfg.cargo_error_rate, cfg.event_error_rate, cfg.timing_error_rate};
    truth.validate();
    auto gen = generate_portcalls(truth, cfg.count, seed);
    std::vector<Corruption> manifest;
    const auto& r = truth.error_rates;
    if (r.cargo_info > 0.0 || r.port_event > 0.0 || r.port_timing > 0.0) {
        auto inj = inject_errors(gen.portcalls, r, derive_seed(seed, kInjectionStream));
        gen.portcalls = std::move(inj.portcalls);
        manifest = std::move(inj.manifest);
    }
    write_with(cfg.out, [&](std::ostream& o) { write_log(o, gen.portcalls); });
    if (!cfg.truth_out.empty()) write_json(cfg.truth_out, json::to_json(std::span<const TruthEntry>(gen.truth)));
    if (!cfg.manifest_out.empty()) write_json(cfg.manifest_out, json::to_json(std::span<const Corruption>(manifest)));
    out << "generated " << gen.portcalls.size() << " portcalls, " << manifest.size() << " injected errors\n";
    return kExitOk;
}

int cmd_standardize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto log = load_log(cfg, err);
    write_with(cfg.out, [&](std::ostream& o) { write_log(o, log.portcalls); });
    if (!cfg.rejections_out.empty())
        write_with(cfg.rejections_out, [&](std::ostream& o) {
            o << "line_number,reason\n";
            for (const auto& r : log.report.rejections) {
                const std::string row[] = {std::to_string(r.line_number), r.reason};
                csv::write_row(o, row);
            }
        });
    out << "accepted " << log.report.accepted << " rows, rejected " << log.report.rejected << "\n";
    return kExitOk;
}

int cmd_clean(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto log = load_log(cfg, err);
    CleaningPolicy policy;
    policy.max_discard_fraction = cfg.max_discard;
    if (!(cfg.gap_days > 0.0)) throw UsageError("--gap-days must be positive");
    policy.max_neighbor_gap_minutes = static_cast<std::int64_t>(cfg.gap_days * 24.0 * 60.0);
    const auto outcome = apply_cleaning(log.portcalls, policy);
    write_with(cfg.out, [&](std::ostream& o) { write_log(o, outcome.cleaned); });
    if (!cfg.audit_out.empty()) write_with(cfg.audit_out, [&](std::ostream& o) { write_audit_csv(o, outcome.audit); });
    if (!cfg.discarded_out.empty())
        write_with(cfg.discarded_out, [&](std::ostream& o) {
            o << "portcall_id,record_index,class,description\n";
            for (const auto& d : outcome.discarded)
                for (const auto& v : d.violations) {
                    const std::string row[] = {v.portcall_id, v.record_index ? std::to_string(*v.record_index) : "",
                                               std::string(violation_class_name(v.cls)), v.description};
                    csv::write_row(o, row);
                }
        });
    out << "cleaned " << outcome.cleaned.size() << ", discarded " << outcome.discarded.size() << ", repairs "
        << outcome.audit.size() << "\n";
    return kExitOk;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto log = load_log(cfg, err);
    const auto table = data_statistics(log.portcalls);
    write_with(cfg.out, [&](std::ostream& o) { write_statistics_csv(o, table); });
    out << "summarized " << log.portcalls.size() << " portcalls\n";
    return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto log = load_log(cfg, err);
    const auto profiles = load_profiles(cfg);
    const auto seed = require_seed(cfg);
    FitOptions options;
    options.seed = seed;
    options.threads = cfg.threads;
    FitReport report;
    const auto registry = fit_registry(log.portcalls, profiles, options, &report);
    write_json(cfg.out, json::to_json(registry));
    if (!cfg.report_out.empty()) write_json(cfg.report_out, json::to_json(report));
    for (const auto& b : report.blocks)
        if (!b.converged)
            err << "warning: block " << block_name(b.kind) << " at terminal " << b.terminal << " is "
                << (b.approach == "unavailable" ? "unavailable (too few observations)" : "not KS-converged") << "\n";
    out << "fitted " << registry.catalog.size() << " regression lines and " << registry.blocks.size()
        << " block models\n";
    return kExitOk;
}

JobSpec job_from_json(const nlohmann::json& j, const AliasMap& aliases, const ModelRegistry& registry) {
    auto str = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_string()) throw FormatError(std::string("job: missing string '") + key + "'");
        return j.at(key).get<std::string>();
    };
    JobSpec job;
    job.terminal = str("terminal");
    auto shipment = shipment_from_name(str("shipment"));
    if (!shipment) throw FormatError("job: unknown shipment type");
    job.shipment = *shipment;
    if (!j.contains("cargoes") || !j.at("cargoes").is_array()) throw FormatError("job: missing 'cargoes' array");
    for (const auto& c : j.at("cargoes")) {
        if (!c.contains("cargo") || !c.at("cargo").is_string() || !c.contains("size_mt") || !c.at("size_mt").is_number())
            throw FormatError("job: each cargo needs 'cargo' and 'size_mt'");
        auto ref = standardize_cargo(c.at("cargo").get<std::string>(), aliases);
        ref.recorded_label = ref.canonical_name;
        ref.via_typo_rule = false;
        job.cargoes.push_back({ref, c.at("size_mt").get<double>()});
    }
    if (j.contains("mode")) {
        auto mode = operation_mode_from_name(str("mode"));
        if (!mode) throw FormatError("job: unknown operation mode");
        job.mode = *mode;
    } else {
        job.mode = job.cargoes.size() == 1 ? OperationMode::Single : OperationMode::Sequential;
    }
    job.needs_shifting = j.value("needs_shifting", false);
    job.prewash_policy = registry.profile(job.terminal).prewash_policy;
    job.validate();
    return job;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
    const auto registry = load_models(cfg);
    const auto aliases = load_aliases(cfg);
    const auto options = predict_options(cfg);
    const auto which = scenarios(cfg);
    auto input = json::parse(read_file(cfg.input, "job file"), "job file");
    if (!input.is_array()) input = nlohmann::json::array({input});
    json::Json results = json::Json::array();
    for (const auto& j : input) {
        const auto job = job_from_json(j, aliases, registry);
        json::Json preds = json::Json::array();
        for (auto s : which) {
            try {
                preds.push_back(json::to_json(predict_berth_stay(registry, job, s, options)));
            } catch (const NotApplicable& e) {
                preds.push_back({{"scenario", std::string(scenario_name(s))}, {"status", "N.A."}, {"reason", e.what()}});
            }
        }
        results.push_back({{"terminal", job.terminal}, {"predictions", preds}});
    }
    write_json(cfg.out, results);
    out << "predicted " << input.size() << " job(s)\n";
    return kExitOk;
}

ScenarioReport evaluate(const RunConfig& cfg, std::ostream& err) {
    const auto registry = load_models(cfg);
    const auto options = predict_options(cfg);
    const auto log = load_log(cfg, err);
    auto report = evaluate_scenarios(registry, log.portcalls, options);
    if (!report.skipped.empty()) err << "warning: " << report.skipped.size() << " portcall(s) skipped\n";
    return report;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto report = evaluate(cfg, err);
    write_with(cfg.out, [&](std::ostream& o) { write_report_csv(o, report); });
    if (!cfg.json_out.empty()) write_json(cfg.json_out, json::to_json(report));
    out << "evaluated " << report.portcalls.size() << " portcalls\n";
    return kExitOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.out.empty()) throw UsageError("missing required path: --out directory");
    if (!fs::is_directory(cfg.out)) throw UsageError("output directory not found: " + cfg.out);
    const auto report = evaluate(cfg, err);
    const fs::path dir(cfg.out);
    write_with((dir / "report.csv").string(), [&](std::ostream& o) { write_report_csv(o, report); });
    write_json((dir / "report.json").string(), json::to_json(report));
    std::size_t files = 2;
    for (auto s : all_scenarios()) {
        std::vector<double> errors;
        for (const auto& c : report.cells)
            if (c.key.scenario == s) errors.insert(errors.end(), c.errors.begin(), c.errors.end());
        if (errors.empty()) continue;
        const auto bins = error_histogram(errors);
        write_with((dir / ("histogram_" + std::string(scenario_name(s)) + ".csv")).string(),
                   [&](std::ostream& o) { write_histogram_csv(o, bins); });
        ++files;
    }
    out << "wrote " << files << " report files to " << cfg.out << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "JSON run config; its values override flags");
    sub->add_option("--threads", cfg.threads, "Worker threads (outputs do not depend on this)");
    sub->add_option("--terminal", cfg.terminal, "Restrict to one terminal (A, B or a profile name)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string config_path;
    CLI::App app{"Berth-stay prediction for tanker terminals", "berthstay"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "Generate a synthetic standardized log from the ground-truth models");
    synth->add_option("--seed", cfg.seed, "Master seed");
    synth->add_option("--count", cfg.count, "Number of portcalls");
    synth->add_option("--out", cfg.out, "Output CSV log");
    synth->add_option("--truth", cfg.truth_out, "Optional truth log JSON");
    synth->add_option("--manifest", cfg.manifest_out, "Optional corruption manifest JSON");
    synth->add_option("--cargo-error-rate", cfg.cargo_error_rate, "Per-record cargo typo rate");
    synth->add_option("--event-error-rate", cfg.event_error_rate, "Per-record event substitution rate");
    synth->add_option("--timing-error-rate", cfg.timing_error_rate, "Per-record month/day swap rate");
    add_common(synth, cfg, config_path);

    auto* standardize = app.add_subcommand("standardize", "Map terminal labels onto standard events and grades");
    standardize->add_option("--input", cfg.input, "Raw CSV log");
    standardize->add_option("--out", cfg.out, "Standardized CSV log");
    standardize->add_option("--rejections", cfg.rejections_out, "Optional CSV of rejected rows");

    auto* clean = app.add_subcommand("clean", "Detect and repair logging errors");
    clean->add_option("--input", cfg.input, "Standardized CSV log");
    clean->add_option("--out", cfg.out, "Cleaned CSV log");
    clean->add_option("--audit", cfg.audit_out, "Optional repair audit CSV");
    clean->add_option("--discarded", cfg.discarded_out, "Optional CSV of discarded portcalls");
    clean->add_option("--max-discard", cfg.max_discard, "Largest tolerated discard fraction");
    clean->add_option("--gap-days", cfg.gap_days, "Timeline gap that marks a timestamp as jumped");

    auto* stats = app.add_subcommand("stats", "Portcall and operation counts per terminal");
    stats->add_option("--input", cfg.input, "CSV log");
    stats->add_option("--out", cfg.out, "Statistics CSV");

    auto* fit = app.add_subcommand("fit", "Fit regression lines and block models");
    fit->add_option("--input", cfg.input, "Cleaned CSV log");
    fit->add_option("--out", cfg.out, "Model registry JSON");
    fit->add_option("--seed", cfg.seed, "Master seed");
    fit->add_option("--profiles", cfg.profiles, "Terminal profiles JSON array");
    fit->add_option("--report", cfg.report_out, "Optional fit report JSON");

    auto* predict = app.add_subcommand("predict", "Predict berth stay for jobs");
    predict->add_option("--models", cfg.models, "Model registry JSON");
    predict->add_option("--input", cfg.input, "Job JSON (object or array)");
    predict->add_option("--out", cfg.out, "Prediction JSON");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Prediction errors per scenario against logged stays");
    evaluate_cmd->add_option("--models", cfg.models, "Model registry JSON");
    evaluate_cmd->add_option("--input,--data", cfg.input, "Cleaned CSV log");
    evaluate_cmd->add_option("--out", cfg.out, "Report CSV");
    evaluate_cmd->add_option("--json", cfg.json_out, "Optional report JSON");

    auto* report = app.add_subcommand("report", "Evaluation report plus error histograms");
    report->add_option("--models", cfg.models, "Model registry JSON");
    report->add_option("--input,--data", cfg.input, "Cleaned CSV log");
    report->add_option("--out", cfg.out, "Existing output directory");

    for (auto* sub : {standardize, clean, stats, fit, predict, evaluate_cmd, report}) {
        add_common(sub, cfg, config_path);
        sub->add_option("--aliases-events", cfg.aliases_events, "Event alias CSV");
        sub->add_option("--aliases-cargo", cfg.aliases_cargo, "Cargo alias CSV");
    }
    for (auto* sub : {predict, evaluate_cmd, report}) {
        sub->add_option("--seed", cfg.seed, "Master seed (Monte Carlo mode)");
        sub->add_option("--scenario", cfg.scenario, "1, 2, 3, 4 or all");
        sub->add_option("--mode", cfg.mode, "expectation or mc:N");
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) apply_config(cfg, config_path);
        if (cfg.command == "synth") return cmd_synth(cfg, out);
        if (cfg.command == "standardize") return cmd_standardize(cfg, out, err);
        if (cfg.command == "clean") return cmd_clean(cfg, out, err);
        if (cfg.command == "stats") return cmd_stats(cfg, out, err);
        if (cfg.command == "fit") return cmd_fit(cfg, out, err);
        if (cfg.command == "predict") return cmd_predict(cfg, out);
        if (cfg.command == "evaluate") return cmd_evaluate(cfg, out, err);
        if (cfg.command == "report") return cmd_report(cfg, out, err);
        throw UsageError("unknown command " + cfg.command);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DiscardBudgetExceeded& e) {
        err << "error: DiscardBudgetExceeded: " << e.what() << "\n";
        return kExitDataError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
}

}  // namespace berthstay::cli
