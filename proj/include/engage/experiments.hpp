#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "engage/belief.hpp"
#include "engage/simulator.hpp"

namespace engage {

/// Malformed or invalid configuration input. Maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulate run: one scenario evaluated under several policies with the
/// same seed.
struct RunConfig {
    ScenarioConfig scenario;
    std::vector<PolicyKind> policies{PolicyKind::optimal, PolicyKind::always_on,
                                     PolicyKind::always_off};
};

enum class SweepVariable : std::uint8_t { alpha_low, alpha_high, eta, phi };

std::string_view to_string(SweepVariable v) noexcept;

struct SweepSpec {
    SweepVariable variable = SweepVariable::alpha_low;
    std::vector<double> values;
    ScenarioConfig base;
    std::vector<PolicyKind> policies{PolicyKind::optimal, PolicyKind::always_on,
                                     PolicyKind::always_off};
    int episodes = 200;
};

struct SweepCell {
    PolicyKind policy = PolicyKind::optimal;
    BatchStats stats;
    bool best = false;  ///< highest mean accuracy in its row, ties included
};

struct SweepRow {
    double value = 0.0;
    std::vector<SweepCell> cells;
};

struct SweepResult {
    SweepVariable variable = SweepVariable::alpha_low;
    std::vector<SweepRow> rows;
};

/// Accuracy gap (as a fraction) within which policies share the best mark;
/// half of the 0.1 percentage-point display resolution.
inline constexpr double kBestTolerance = 5e-4;

ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);

/// Parses a simulate config document. Every field is optional; missing model
/// parameters take the baseline values. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

/// Reads and parses a JSON file. Throws ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

void set_parameter(ModelParams& params, SweepVariable variable, double value);

/// Runs every (value, policy) cell of the sweep.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Sweep CSV: variable,value,policy,mean_accuracy,std_accuracy,mean_advice_on_fraction,best
std::string sweep_csv(const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result);

nlohmann::json summary_json(PolicyKind policy, const EpisodeSummary& summary,
                            const ScenarioConfig& scenario);

/// Four stacked panels over time: context, advice, true engagement and
/// correctness, one series per policy.
std::string trace_plot_svg(const std::vector<std::pair<PolicyKind, EpisodeSummary>>& runs);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// "point:<theta>" or a comma-separated mass vector with grid_size + 1
/// entries summing to 1. Throws ConfigError.
Belief parse_belief_spec(std::string_view spec, const ThetaGrid& grid);

/// Runs cmd_simulate: writes trace_<policy>.csv per policy, summary.json and
/// optionally plot.svg into `out_dir`. Returns the per-policy summaries.
std::vector<std::pair<PolicyKind, EpisodeSummary>> simulate_to_directory(
    const RunConfig& config, const std::filesystem::path& out_dir, bool plot);

/// Runs cmd_sweep: writes sweep.csv and sweep.json into `out_dir`.
SweepResult sweep_to_directory(const SweepSpec& spec, const std::filesystem::path& out_dir);

}  // namespace engage
