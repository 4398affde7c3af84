// Command-line front end: simulate, sweep and plan-debug.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "engage/experiments.hpp"
#include "engage/policy.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<int> episodes;
    bool plot = false;
};

void apply_overrides(engage::ScenarioConfig& cfg, const CommonOptions& opt) {
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.steps) cfg.steps = *opt.steps;
    try {
        cfg.validate();
    } catch (const engage::InvalidArgument& e) {
        throw engage::ConfigError(e.what());
    }
}

int cmd_simulate(const CommonOptions& opt) {
    engage::RunConfig rc = engage::run_config_from_json(
        opt.config.empty() ? nlohmann::json::object() : engage::read_json_file(opt.config));
    apply_overrides(rc.scenario, opt);
    const auto runs = engage::simulate_to_directory(rc, opt.out, opt.plot);
    for (const auto& [policy, s] : runs) {
        std::printf("%-10s accuracy=%.4f advice_on=%.4f mean_theta=%.4f\n",
                    std::string(engage::to_string(policy)).c_str(), s.accuracy,
                    s.advice_on_fraction, s.mean_theta);
    }
    return 0;
}

int cmd_sweep(const CommonOptions& opt) {
    if (opt.config.empty()) throw engage::ConfigError("sweep requires --config <sweep.json>");
    engage::SweepSpec spec = engage::sweep_spec_from_json(engage::read_json_file(opt.config));
    apply_overrides(spec.base, opt);
    if (opt.episodes) {
        if (*opt.episodes < 1) throw engage::ConfigError("episodes must be at least 1");
        spec.episodes = *opt.episodes;
    }
    const engage::SweepResult result = engage::sweep_to_directory(spec, opt.out);
    std::cout << engage::sweep_csv(result);
    return 0;
}

int cmd_plan_debug(const CommonOptions& opt, const std::string& belief_spec,
                   const std::string& context_name, const std::string& view_name,
                   std::optional<int> horizon) {
    engage::ModelParams params;
    if (!opt.config.empty()) {
        const auto j = engage::read_json_file(opt.config);
        params = engage::run_config_from_json(j).scenario.params;
    }
    if (horizon) params.horizon = *horizon;
    try {
        params.validate();
    } catch (const engage::InvalidArgument& e) {
        throw engage::ConfigError(e.what());
    }
    if (context_name != "low" && context_name != "high") {
        throw engage::ConfigError("--context must be low or high");
    }
    const auto context = context_name == "low" ? engage::Context::low : engage::Context::high;
    engage::ContextView view;
    try {
        view = engage::parse_context_view(view_name);
    } catch (const engage::InvalidArgument& e) {
        throw engage::ConfigError(e.what());
    }
    const engage::ThetaGrid grid(params.grid_size);
    const engage::Belief belief = engage::parse_belief_spec(belief_spec, grid);
    const auto decision =
        engage::select_action(engage::PolicyKind::optimal, belief, context, params, view);
    std::printf("horizon=%d view=%s context=%s expected_theta=%.6f\n", params.horizon,
                view_name.c_str(), context_name.c_str(), engage::expected_theta(belief, grid));
    std::printf("value_on=%.12f\nvalue_off=%.12f\naction=%s\n", decision.values->on,
                decision.values->off, std::string(engage::to_string(decision.action)).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Engagement-aware advice timing: simulation, sweeps and planner inspection"};
    app.require_subcommand(1);

    CommonOptions opt;
    auto add_common = [&](CLI::App* sub, bool with_outputs) {
        sub->add_option("--config", opt.config, "JSON config file");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--steps", opt.steps, "override steps per episode");
        if (with_outputs) sub->add_option("--out", opt.out, "output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "run one episode per policy and write traces");
    add_common(simulate, true);
    simulate->add_flag("--plot", opt.plot, "also write plot.svg");

    auto* sweep = app.add_subcommand("sweep", "run a one-parameter sweep over batches");
    add_common(sweep, true);
    sweep->add_option("--episodes", opt.episodes, "episodes per sweep cell");

    std::string belief_spec;
    std::string context_name;
    std::string view_name = "current";
    std::optional<int> horizon;
    auto* plan = app.add_subcommand("plan-debug", "print forward-search values for one belief");
    plan->add_option("--config", opt.config, "JSON config file (params are read from it)");
    plan->add_option("--belief", belief_spec, "point:<theta> or comma-separated masses")
        ->required();
    plan->add_option("--context", context_name, "low or high")->required();
    plan->add_option("--view", view_name, "current or previous");
    plan->add_option("--horizon", horizon, "override the search horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(opt);
        if (*sweep) return cmd_sweep(opt);
        return cmd_plan_debug(opt, belief_spec, context_name, view_name, horizon);
    } catch (const engage::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
