#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "engage/belief.hpp"
#include "engage/model.hpp"
#include "engage/policy.hpp"

namespace engage {

/// How the task context evolves during an episode.
struct ContextSchedule {
    enum class Kind : std::uint8_t { alternating, stochastic };

    Kind kind = Kind::stochastic;
    int block_length = 20;           ///< alternating only
    Context start = Context::high;   ///< first context of the episode

    static ContextSchedule alternating(int block_length, Context start = Context::high) {
        return {Kind::alternating, block_length, start};
    }
    static ContextSchedule stochastic(Context initial = Context::high) {
        return {Kind::stochastic, 20, initial};
    }
};

struct ScenarioConfig {
    ContextSchedule schedule;
    int steps = 1000;
    std::uint64_t seed = 0;
    ModelParams params;
    PolicyKind policy = PolicyKind::optimal;
    /// The policy plans from the last context revealed with the previous
    /// decision unless set to ContextView::current.
    ContextView view = ContextView::previous;

    void validate() const;
};

/// One row of an episode trace. Engagement values are those in effect when
/// the step was taken, before its update.
struct StepRecord {
    int t = 0;
    Context context = Context::low;
    Action action = Action::off;
    std::optional<Adherence> adherence;
    Decision decision = Decision::correct;
    Decision counterfactual = Decision::correct;
    double theta_true = 1.0;
    double belief_expected_theta = 1.0;
    double reward = 0.0;
};

struct EpisodeSummary {
    double accuracy = 0.0;
    double advice_on_fraction = 0.0;
    double mean_theta = 0.0;
    double total_discounted_reward = 0.0;
    std::vector<StepRecord> trace;
};

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation, 0 for one episode
};

struct BatchStats {
    int episodes = 0;
    MetricStats accuracy;
    MetricStats advice_on_fraction;
    MetricStats mean_theta;
};

/// Seed of episode `index` in a batch: base ^ (index * 0x9E3779B97F4A7C15).
/// Index 0 reproduces the base seed.
std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Context in effect at step t under an alternating schedule.
Context alternating_context(const ContextSchedule& schedule, int t) noexcept;

EpisodeSummary run_episode(const ScenarioConfig& config);

/// Runs `episodes` independent episodes on up to `threads` worker threads
/// (0 picks the hardware concurrency). Results do not depend on the thread
/// count.
BatchStats run_batch(const ScenarioConfig& config, int episodes, unsigned threads = 0);

/// Trace CSV with header
/// t,context,action,adherence,decision,counterfactual,theta_true,belief_expected_theta,reward
void write_trace_csv(std::ostream& os, const std::vector<StepRecord>& trace);

}  // namespace engage
