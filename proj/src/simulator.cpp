#include "engage/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <ostream>
#include <thread>

namespace engage {

void ScenarioConfig::validate() const {
    params.validate();
    if (steps < 1) throw InvalidArgument("steps must be at least 1");
    if (schedule.kind == ContextSchedule::Kind::alternating && schedule.block_length < 1) {
        throw InvalidArgument("block_length must be at least 1");
    }
}

std::uint64_t episode_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return base ^ (index * 0x9E3779B97F4A7C15ULL);
}

Context alternating_context(const ContextSchedule& schedule, int t) noexcept {
    return (t / schedule.block_length) % 2 == 0 ? schedule.start : flip(schedule.start);
}

EpisodeSummary run_episode(const ScenarioConfig& config) {
    config.validate();
    const ModelParams& params = config.params;
    Rng rng(config.seed);
    const BeliefDynamics dynamics(params);
    std::optional<ForwardSearch> search;
    if (config.policy == PolicyKind::optimal) search.emplace(params, config.view);

    std::vector<double> belief = initial_belief(dynamics.grid()).mass;
    std::vector<double> next_belief(belief.size());
    double theta = 1.0;
    Context context = config.schedule.start;
    Context last_seen = context;

    EpisodeSummary summary;
    summary.trace.reserve(static_cast<std::size_t>(config.steps));
    int correct = 0;
    int advised = 0;
    double theta_sum = 0.0;
    double discount = 1.0;

    for (int t = 0; t < config.steps; ++t) {
        Action action = config.policy == PolicyKind::always_on ? Action::on : Action::off;
        if (search) {
            const Context known = config.view == ContextView::current ? context : last_seen;
            action = search->decide(belief, known).action;
        }

        const StepOutcome outcome = sample_step(params, context, theta, action, rng);
        const bool ok = outcome.decision == Decision::correct;
        const double reward = ok ? params.r_correct : params.r_incorrect;

        StepRecord rec;
        rec.t = t;
        rec.context = context;
        rec.action = action;
        rec.adherence = outcome.adherence;
        rec.decision = outcome.decision;
        rec.counterfactual = outcome.counterfactual;
        rec.theta_true = theta;
        rec.belief_expected_theta = expected_theta(Belief{belief}, dynamics.grid());
        rec.reward = reward;
        summary.trace.push_back(rec);

        correct += ok ? 1 : 0;
        advised += action == Action::on ? 1 : 0;
        theta_sum += theta;
        summary.total_discounted_reward += discount * reward;
        discount *= params.gamma;

        const Context next_context =
            config.schedule.kind == ContextSchedule::Kind::alternating
                ? alternating_context(config.schedule, t + 1)
                : sample_context_transition(params, context, rng);

        const double likelihood =
            dynamics.propagate(belief, context, action, outcome.decision, next_belief);
        if (!(likelihood > 0.0)) {
            std::string msg = "step " + std::to_string(t) + ": simulated decision '" +
                              std::string(to_string(outcome.decision)) +
                              "' has zero probability under the belief";
            if (dynamics.endpoints_stuck()) {
                msg += " (grid_size " + std::to_string(params.grid_size) +
                       " is too coarse for eta " + std::to_string(params.eta) +
                       "; need eta >= 1 / (2 * grid_size))";
            }
            throw ImpossibleObservation(msg);
        }
        belief.swap(next_belief);
        theta = outcome.theta_after;
        last_seen = context;
        context = next_context;
    }

    const double n = static_cast<double>(config.steps);
    summary.accuracy = correct / n;
    summary.advice_on_fraction = advised / n;
    summary.mean_theta = theta_sum / n;
    return summary;
}

namespace {

MetricStats stats_of(const std::vector<double>& xs) {
    MetricStats s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

BatchStats run_batch(const ScenarioConfig& config, int episodes, unsigned threads) {
    config.validate();
    if (episodes < 1) throw InvalidArgument("episodes must be at least 1");
    const auto n = static_cast<std::size_t>(episodes);
    std::vector<double> accuracy(n), advice(n), mean_theta(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                ScenarioConfig cfg = config;
                cfg.seed = episode_seed(config.seed, i);
                const EpisodeSummary s = run_episode(cfg);
                accuracy[i] = s.accuracy;
                advice[i] = s.advice_on_fraction;
                mean_theta[i] = s.mean_theta;
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    return {episodes, stats_of(accuracy), stats_of(advice), stats_of(mean_theta)};
}

namespace {

void put_double(std::ostream& os, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    os.write(buf, res.ptr - buf);
}

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<StepRecord>& trace) {
    os << "t,context,action,adherence,decision,counterfactual,theta_true,"
          "belief_expected_theta,reward\n";
    for (const StepRecord& r : trace) {
        os << r.t << ',' << to_string(r.context) << ',' << to_string(r.action) << ',';
        if (r.adherence) os << to_string(*r.adherence);
        os << ',' << to_string(r.decision) << ',' << to_string(r.counterfactual) << ',';
        put_double(os, r.theta_true);
        os << ',';
        put_double(os, r.belief_expected_theta);
        os << ',';
        put_double(os, r.reward);
        os << '\n';
    }
}

}  // namespace engage
