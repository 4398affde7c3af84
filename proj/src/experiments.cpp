#include "engage/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace engage {

using nlohmann::json;

std::string_view to_string(SweepVariable v) noexcept {
    switch (v) {
        case SweepVariable::alpha_low: return "alpha_low";
        case SweepVariable::alpha_high: return "alpha_high";
        case SweepVariable::eta: return "eta";
        case SweepVariable::phi: return "phi";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
        }
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Context parse_context(const std::string& s) {
    if (s == "low") return Context::low;
    if (s == "high") return Context::high;
    throw ConfigError("context must be 'low' or 'high', got '" + s + "'");
}

SweepVariable parse_variable(const std::string& s) {
    for (auto v : {SweepVariable::alpha_low, SweepVariable::alpha_high, SweepVariable::eta,
                   SweepVariable::phi}) {
        if (s == to_string(v)) return v;
    }
    throw ConfigError("unknown sweep variable '" + s + "'");
}

std::vector<PolicyKind> parse_policies(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("policies must be a nonempty array");
    std::vector<PolicyKind> out;
    for (const auto& item : j) {
        if (!item.is_string()) throw ConfigError("policy names must be strings");
        try {
            out.push_back(parse_policy(item.get<std::string>()));
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    return out;
}

ContextSchedule schedule_from_json(const json& j) {
    reject_unknown_keys(j, {"type", "block_length", "start"}, "schedule");
    std::string type = "stochastic";
    read_field(j, "type", type);
    ContextSchedule s;
    if (type == "alternating") {
        s.kind = ContextSchedule::Kind::alternating;
    } else if (type != "stochastic") {
        throw ConfigError("schedule type must be 'alternating' or 'stochastic'");
    }
    read_field(j, "block_length", s.block_length);
    std::string start = "high";
    read_field(j, "start", start);
    s.start = parse_context(start);
    return s;
}

ScenarioConfig scenario_from_json(const json& j, bool allow_policy_list) {
    if (allow_policy_list) {
        reject_unknown_keys(j, {"params", "schedule", "steps", "seed", "context_view", "policies"},
                            "config");
    } else {
        reject_unknown_keys(j, {"params", "schedule", "steps", "seed", "context_view"}, "base");
    }
    ScenarioConfig cfg;
    if (j.contains("params")) cfg.params = params_from_json(j.at("params"));
    if (j.contains("schedule")) cfg.schedule = schedule_from_json(j.at("schedule"));
    read_field(j, "steps", cfg.steps);
    read_field(j, "seed", cfg.seed);
    if (j.contains("context_view")) {
        try {
            cfg.view = parse_context_view(j.at("context_view").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("context_view: ") + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json schedule_to_json(const ContextSchedule& s) {
    if (s.kind == ContextSchedule::Kind::alternating) {
        return {{"type", "alternating"},
                {"block_length", s.block_length},
                {"start", std::string(to_string(s.start))}};
    }
    return {{"type", "stochastic"}, {"start", std::string(to_string(s.start))}};
}

}  // namespace

ModelParams params_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"alpha_low", "alpha_high", "eta", "phi", "gamma", "r_correct",
                         "r_incorrect", "grid_size", "horizon"},
                        "params");
    ModelParams p;
    read_field(j, "alpha_low", p.alpha_low);
    read_field(j, "alpha_high", p.alpha_high);
    read_field(j, "eta", p.eta);
    read_field(j, "phi", p.phi);
    read_field(j, "gamma", p.gamma);
    read_field(j, "r_correct", p.r_correct);
    read_field(j, "r_incorrect", p.r_incorrect);
    read_field(j, "grid_size", p.grid_size);
    read_field(j, "horizon", p.horizon);
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

json params_to_json(const ModelParams& p) {
    return {{"alpha_low", p.alpha_low}, {"alpha_high", p.alpha_high}, {"eta", p.eta},
            {"phi", p.phi},             {"gamma", p.gamma},           {"r_correct", p.r_correct},
            {"r_incorrect", p.r_incorrect}, {"grid_size", p.grid_size}, {"horizon", p.horizon}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig rc;
    rc.scenario = scenario_from_json(j, true);
    if (j.contains("policies")) rc.policies = parse_policies(j.at("policies"));
    return rc;
}

SweepSpec sweep_spec_from_json(const json& j) {
    reject_unknown_keys(j, {"variable", "values", "base", "policies", "episodes"}, "sweep");
    SweepSpec spec;
    if (!j.contains("variable")) throw ConfigError("sweep needs a 'variable'");
    std::string variable;
    read_field(j, "variable", variable);
    spec.variable = parse_variable(variable);
    read_field(j, "values", spec.values);
    if (spec.values.empty()) throw ConfigError("sweep 'values' must be nonempty");
    spec.base = scenario_from_json(j.value("base", json::object()), false);
    if (j.contains("policies")) spec.policies = parse_policies(j.at("policies"));
    read_field(j, "episodes", spec.episodes);
    if (spec.episodes < 1) throw ConfigError("episodes must be at least 1");
    for (double v : spec.values) {
        ModelParams p = spec.base.params;
        try {
            set_parameter(p, spec.variable, v);
            p.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError("sweep value " + format_double(v) + ": " + e.what());
        }
    }
    return spec;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void set_parameter(ModelParams& params, SweepVariable variable, double value) {
    switch (variable) {
        case SweepVariable::alpha_low: params.alpha_low = value; break;
        case SweepVariable::alpha_high: params.alpha_high = value; break;
        case SweepVariable::eta: params.eta = value; break;
        case SweepVariable::phi: params.phi = value; break;
    }
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    SweepResult result;
    result.variable = spec.variable;
    for (double value : spec.values) {
        SweepRow row;
        row.value = value;
        for (PolicyKind policy : spec.policies) {
            ScenarioConfig cfg = spec.base;
            set_parameter(cfg.params, spec.variable, value);
            cfg.policy = policy;
            row.cells.push_back({policy, run_batch(cfg, spec.episodes, threads), false});
        }
        double top = -1.0;
        for (const auto& cell : row.cells) top = std::max(top, cell.stats.accuracy.mean);
        for (auto& cell : row.cells) cell.best = cell.stats.accuracy.mean >= top - kBestTolerance;
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "variable,value,policy,mean_accuracy,std_accuracy,mean_advice_on_fraction,best\n";
    for (const auto& row : result.rows) {
        for (const auto& cell : row.cells) {
            os << to_string(result.variable) << ',' << format_double(row.value) << ','
               << to_string(cell.policy) << ',' << format_double(cell.stats.accuracy.mean) << ','
               << format_double(cell.stats.accuracy.stddev) << ','
               << format_double(cell.stats.advice_on_fraction.mean) << ','
               << (cell.best ? "true" : "false") << '\n';
        }
    }
    return os.str();
}

json sweep_json(const SweepResult& result) {
    json rows = json::array();
    for (const auto& row : result.rows) {
        json cells = json::array();
        for (const auto& cell : row.cells) {
            const BatchStats& s = cell.stats;
            cells.push_back({{"policy", std::string(to_string(cell.policy))},
                             {"episodes", s.episodes},
                             {"mean_accuracy", s.accuracy.mean},
                             {"std_accuracy", s.accuracy.stddev},
                             {"mean_advice_on_fraction", s.advice_on_fraction.mean},
                             {"std_advice_on_fraction", s.advice_on_fraction.stddev},
                             {"mean_theta", s.mean_theta.mean},
                             {"std_theta", s.mean_theta.stddev},
                             {"best", cell.best}});
        }
        rows.push_back({{"value", row.value}, {"policies", cells}});
    }
    return {{"variable", std::string(to_string(result.variable))}, {"rows", rows}};
}

json summary_json(PolicyKind policy, const EpisodeSummary& summary,
                  const ScenarioConfig& scenario) {
    return {{"policy", std::string(to_string(policy))},
            {"accuracy", summary.accuracy},
            {"advice_on_fraction", summary.advice_on_fraction},
            {"mean_theta", summary.mean_theta},
            {"total_discounted_reward", summary.total_discounted_reward},
            {"seed", scenario.seed},
            {"steps", scenario.steps},
            {"context_view", std::string(to_string(scenario.view))},
            {"schedule", schedule_to_json(scenario.schedule)},
            {"params", params_to_json(scenario.params)}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Belief parse_belief_spec(std::string_view spec, const ThetaGrid& grid) {
    auto parse_number = [](std::string_view text) {
        while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
        while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
        double x = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
            throw ConfigError("malformed number '" + std::string(text) + "' in belief spec");
        }
        return x;
    };

    constexpr std::string_view kPoint = "point:";
    if (spec.starts_with(kPoint)) {
        const double theta = parse_number(spec.substr(kPoint.size()));
        if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("point belief must lie in [0, 1]");
        return Belief::point(grid, theta);
    }

    std::vector<double> mass;
    while (true) {
        const auto comma = spec.find(',');
        mass.push_back(parse_number(spec.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        spec.remove_prefix(comma + 1);
    }
    if (mass.size() != grid.size()) {
        throw ConfigError("belief vector has " + std::to_string(mass.size()) +
                          " entries, grid has " + std::to_string(grid.size()));
    }
    try {
        return Belief::from_mass(std::move(mass));
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

std::string trace_plot_svg(const std::vector<std::pair<PolicyKind, EpisodeSummary>>& runs) {
    constexpr double kWidth = 900, kLeft = 110, kRight = 20, kPanel = 110, kGap = 30, kTop = 30;
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::size_t steps = 0;
    for (const auto& [_, s] : runs) steps = std::max(steps, s.trace.size());
    const double plot_w = kWidth - kLeft - kRight;
    const double dx = steps > 0 ? plot_w / static_cast<double>(steps) : plot_w;
    const double height = kTop + 4 * (kPanel + kGap);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const char* titles[] = {"context", "advice", "engagement", "correct"};
    for (int p = 0; p < 4; ++p) {
        const double y0 = kTop + p * (kPanel + kGap);
        os << "<rect x=\"" << kLeft << "\" y=\"" << y0 << "\" width=\"" << plot_w
           << "\" height=\"" << kPanel << "\" fill=\"none\" stroke=\"#999\"/>\n"
           << "<text x=\"10\" y=\"" << y0 + kPanel / 2 << "\">" << titles[p] << "</text>\n";
    }

    // context: taken from the first run, all runs share the schedule seed
    if (!runs.empty()) {
        const auto& trace = runs.front().second.trace;
        os << "<polyline fill=\"none\" stroke=\"black\" points=\"";
        for (std::size_t t = 0; t < trace.size(); ++t) {
            const double y = kTop + (trace[t].context == Context::high ? 15.0 : kPanel - 15.0);
            os << kLeft + t * dx << ',' << y << ' ' << kLeft + (t + 1) * dx << ',' << y << ' ';
        }
        os << "\"/>\n";
    }

    const double lane = (kPanel - 10.0) / static_cast<double>(std::max<std::size_t>(runs.size(), 1));
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& [policy, summary] = runs[r];
        const char* color = kColors[r % 4];
        const double legend_y = kTop - 10.0;
        os << "<text x=\"" << kLeft + 150.0 * static_cast<double>(r) << "\" y=\"" << legend_y
           << "\" fill=\"" << color << "\">" << to_string(policy) << "</text>\n";

        const double advice_y = kTop + (kPanel + kGap) + 5.0 + lane * static_cast<double>(r);
        const double correct_y = kTop + 3 * (kPanel + kGap) + 5.0 + lane * static_cast<double>(r);
        for (const auto& rec : summary.trace) {
            const double x = kLeft + rec.t * dx;
            if (rec.action == Action::on) {
                os << "<rect x=\"" << x << "\" y=\"" << advice_y << "\" width=\"" << dx
                   << "\" height=\"" << lane * 0.8 << "\" fill=\"" << color << "\"/>\n";
            }
            if (rec.decision == Decision::correct) {
                os << "<rect x=\"" << x << "\" y=\"" << correct_y << "\" width=\"" << dx
                   << "\" height=\"" << lane * 0.8 << "\" fill=\"" << color << "\"/>\n";
            }
        }
        const double theta_y0 = kTop + 2 * (kPanel + kGap);
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto& rec : summary.trace) {
            os << kLeft + (rec.t + 0.5) * dx << ',' << theta_y0 + (1.0 - rec.theta_true) * kPanel
               << ' ';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<std::pair<PolicyKind, EpisodeSummary>> simulate_to_directory(
    const RunConfig& config, const std::filesystem::path& out_dir, bool plot) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::pair<PolicyKind, EpisodeSummary>> runs;
    json summary = json::array();
    for (PolicyKind policy : config.policies) {
        ScenarioConfig cfg = config.scenario;
        cfg.policy = policy;
        EpisodeSummary s = run_episode(cfg);
        std::ostringstream csv;
        write_trace_csv(csv, s.trace);
        write_file_atomic(out_dir / ("trace_" + std::string(to_string(policy)) + ".csv"),
                          csv.str());
        summary.push_back(summary_json(policy, s, cfg));
        runs.emplace_back(policy, std::move(s));
    }
    write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
    if (plot) write_file_atomic(out_dir / "plot.svg", trace_plot_svg(runs));
    return runs;
}

SweepResult sweep_to_directory(const SweepSpec& spec, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    SweepResult result = run_sweep(spec);
    write_file_atomic(out_dir / "sweep.csv", sweep_csv(result));
    write_file_atomic(out_dir / "sweep.json", sweep_json(result).dump(2) + "\n");
    return result;
}

}  // namespace engage
