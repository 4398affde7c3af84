#pragma once
// Test-only reference computations. These deliberately avoid BeliefDynamics,
// ForwardSearch and the simulator so they can check them.

#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <vector>

#include "engage/belief.hpp"
#include "engage/model.hpp"
#include "engage/policy.hpp"

namespace engage::oracle {

struct EpisodeStep {
    Context context;
    Action advice;
    Observation obs;
};

/// Nearest grid index by linear scan; exact ties keep the lower index.
inline std::size_t scan_snap(double theta, int grid_size) {
    std::size_t best = 0;
    double best_dist = std::abs(theta);
    for (int i = 1; i <= grid_size; ++i) {
        const double d = std::abs(theta - static_cast<double>(i) / grid_size);
        if (d < best_dist) {
            best = static_cast<std::size_t>(i);
            best_dist = d;
        }
    }
    return best;
}

/// One latent branch of a step: the sampled tuple and its probability.
struct Branch {
    StepOutcome outcome;
    double weight;
};

/// Every latent (adherence, counterfactual) combination of one step drawn
/// straight from the generative description, with its probability given
/// engagement theta.
inline std::vector<Branch> latent_branches(const ModelParams& p, Context c, Action a,
                                           double theta) {
    const double alone = c == Context::high ? p.alpha_high : p.alpha_low;
    std::vector<Branch> out;
    for (Decision cf : {Decision::correct, Decision::incorrect}) {
        const double p_cf = cf == Decision::correct ? alone : 1.0 - alone;
        if (a == Action::off) {
            out.push_back({{cf, cf, std::nullopt, 0.0}, p_cf});
            continue;
        }
        out.push_back({{Decision::correct, cf, Adherence::adhered, 0.0}, theta * p_cf});
        out.push_back({{cf, cf, Adherence::ignored, 0.0}, (1.0 - theta) * p_cf});
    }
    return out;
}

/// Exact posterior by enumerating every latent trajectory from theta = 1.
/// Trajectories are never merged; each carries its own snapped engagement.
inline Belief enumerate_filter_oracle(const ModelParams& p, const std::vector<EpisodeStep>& steps) {
    struct Path {
        std::size_t index;
        double weight;
    };
    const auto grid_point = [&](std::size_t i) { return static_cast<double>(i) / p.grid_size; };
    std::vector<Path> paths{{static_cast<std::size_t>(p.grid_size), 1.0}};
    for (const EpisodeStep& s : steps) {
        std::vector<Path> next;
        double total = 0.0;
        for (const Path& path : paths) {
            const double theta = grid_point(path.index);
            for (const Branch& b : latent_branches(p, s.context, s.advice, theta)) {
                if (b.outcome.decision != s.obs.decision || b.weight == 0.0) continue;
                const double after = update_engagement(p, theta, s.advice, b.outcome);
                next.push_back({scan_snap(after, p.grid_size), path.weight * b.weight});
                total += path.weight * b.weight;
            }
        }
        if (!(total > 0.0)) throw ImpossibleObservation("oracle: zero-likelihood observation");
        paths = std::move(next);
    }
    std::vector<double> mass(static_cast<std::size_t>(p.grid_size) + 1, 0.0);
    double total = 0.0;
    for (const Path& path : paths) total += path.weight;
    for (const Path& path : paths) mass[path.index] += path.weight / total;
    return Belief{mass};
}

/// Brute-force expectimax over the action/observation tree. Beliefs are
/// sparse maps from grid index to mass; observation probabilities and
/// posteriors come from latent_branches, rewards from the decision outcome.
class Expectimax {
public:
    Expectimax(const ModelParams& p, ContextView view) : p_(p), view_(view) {}

    using SparseBelief = std::map<std::size_t, double>;

    static SparseBelief sparse(const Belief& b) {
        SparseBelief s;
        for (std::size_t i = 0; i < b.mass.size(); ++i) {
            if (b.mass[i] > 0.0) s[i] = b.mass[i];
        }
        return s;
    }

    double value(const SparseBelief& b, Context c, int depth) const {
        if (depth == 0) return 0.0;
        return std::max(q(b, c, Action::on, depth), q(b, c, Action::off, depth));
    }

    double q(const SparseBelief& b, Context c, Action a, int depth) const {
        if (view_ == ContextView::current) return q_known(b, c, a, depth, true);
        double total = 0.0;
        total += (1.0 - p_.phi) * q_known(b, c, a, depth, false);
        total += p_.phi * q_known(b, flip(c), a, depth, false);
        return total;
    }

private:
    // Expected reward plus discounted continuation when the step's context is c.
    // With `switch_after`, the next context is drawn after the step (current
    // view); otherwise the child plans from c as its last seen context.
    double q_known(const SparseBelief& b, Context c, Action a, int depth, bool switch_after) const {
        double result = 0.0;
        for (Decision y : {Decision::correct, Decision::incorrect}) {
            SparseBelief post;
            double p_y = 0.0;
            for (const auto& [i, m] : b) {
                const double theta = static_cast<double>(i) / p_.grid_size;
                for (const Branch& br : latent_branches(p_, c, a, theta)) {
                    if (br.outcome.decision != y) continue;
                    const double w = m * br.weight;
                    if (w == 0.0) continue;
                    p_y += w;
                    post[scan_snap(update_engagement(p_, theta, a, br.outcome), p_.grid_size)] += w;
                }
            }
            if (p_y == 0.0) continue;
            for (auto& [i, m] : post) m /= p_y;
            const double r = y == Decision::correct ? p_.r_correct : p_.r_incorrect;
            double cont = 0.0;
            if (depth > 1) {
                if (switch_after) {
                    cont = (1.0 - p_.phi) * value(post, c, depth - 1) +
                           p_.phi * value(post, flip(c), depth - 1);
                } else {
                    cont = value(post, c, depth - 1);
                }
            }
            result += p_y * (r + p_.gamma * cont);
        }
        return result;
    }

    ModelParams p_;
    ContextView view_;
};

struct MonteCarloEstimate {
    double mean;
    double standard_error;
};

/// Always-on accuracy by direct simulation of the adherence draw, the
/// decision rule and the engagement update, with a stochastic context.
/// Uses its own engine and distributions, not the library's sampling.
inline MonteCarloEstimate always_on_chain(const ModelParams& p, int steps, int episodes,
                                          unsigned seed) {
    std::mt19937 gen(seed);
    std::bernoulli_distribution switch_ctx(p.phi);
    std::vector<double> acc;
    for (int e = 0; e < episodes; ++e) {
        bool high = true;
        double theta = 1.0;
        int correct = 0;
        for (int t = 0; t < steps; ++t) {
            const double alone = high ? p.alpha_high : p.alpha_low;
            const bool adhere = std::bernoulli_distribution(theta)(gen);
            const bool alone_right = std::bernoulli_distribution(alone)(gen);
            const bool right = adhere || alone_right;
            if (right && alone_right) {
                theta = theta * (1.0 - p.eta);
            } else {
                theta = theta + (1.0 - theta) * p.eta;
            }
            correct += right ? 1 : 0;
            if (switch_ctx(gen)) high = !high;
        }
        acc.push_back(static_cast<double>(correct) / steps);
    }
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    const double sd = std::sqrt(ss / static_cast<double>(acc.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(acc.size()))};
}

/// Draws a random parameter vector with K in [2, max_grid].
inline ModelParams random_params(std::mt19937_64& gen, int max_grid, int max_horizon = 4) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    p.alpha_low = u(gen);
    p.alpha_high = u(gen);
    p.eta = u(gen);
    p.phi = u(gen);
    p.gamma = u(gen);
    p.r_correct = 1.0 + u(gen);
    p.r_incorrect = -u(gen);
    p.grid_size = std::uniform_int_distribution<int>(2, max_grid)(gen);
    p.horizon = std::uniform_int_distribution<int>(1, max_horizon)(gen);
    return p;
}

/// A random episode whose observations are all possible under the snapped
/// dynamics: engagement lives on the grid and is snapped after each update.
inline std::vector<EpisodeStep> random_episode(const ModelParams& p, int length,
                                               std::mt19937_64& gen) {
    std::vector<EpisodeStep> steps;
    Rng rng(gen());
    std::size_t index = static_cast<std::size_t>(p.grid_size);
    Context c = std::bernoulli_distribution(0.5)(gen) ? Context::high : Context::low;
    for (int t = 0; t < length; ++t) {
        const Action a = std::bernoulli_distribution(0.5)(gen) ? Action::on : Action::off;
        const double theta = static_cast<double>(index) / p.grid_size;
        const StepOutcome out = sample_step(p, c, theta, a, rng);
        const Context next = sample_context_transition(p, c, rng);
        steps.push_back({c, a, {out.decision, next}});
        index = scan_snap(out.theta_after, p.grid_size);
        c = next;
    }
    return steps;
}

}  // namespace engage::oracle
