#include "engage/policy.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace engage {

std::string_view to_string(PolicyKind p) noexcept {
    switch (p) {
        case PolicyKind::optimal: return "optimal";
        case PolicyKind::always_on: return "always_on";
        case PolicyKind::always_off: return "always_off";
    }
    return "?";
}

PolicyKind parse_policy(std::string_view name) {
    if (name == "optimal") return PolicyKind::optimal;
    if (name == "always_on") return PolicyKind::always_on;
    if (name == "always_off") return PolicyKind::always_off;
    throw InvalidArgument("unknown policy '" + std::string(name) + "'");
}

std::string_view to_string(ContextView v) noexcept {
    return v == ContextView::current ? "current" : "previous";
}

ContextView parse_context_view(std::string_view name) {
    if (name == "current") return ContextView::current;
    if (name == "previous") return ContextView::previous;
    throw InvalidArgument("unknown context view '" + std::string(name) + "'");
}

double expected_immediate_reward(const Belief& belief, const ModelParams& params, Context c,
                                 Action a) {
    const BeliefDynamics dynamics(params);
    const double p = dynamics.prob_correct(belief.mass, c, a);
    return p * params.r_correct + (1.0 - p) * params.r_incorrect;
}

ForwardSearch::ForwardSearch(const ModelParams& params, ContextView view)
    : params_(params), view_(view), dynamics_(params) {}

ActionValues ForwardSearch::evaluate(std::span<const double> belief, Context c, int depth) {
    if (depth < 1) throw InvalidArgument("search depth must be at least 1");
    if (belief.size() != dynamics_.size()) {
        throw InvalidArgument("belief size does not match grid_size");
    }
    const auto needed = static_cast<std::size_t>(2 * (depth + 1));
    if (scratch_.size() < needed) scratch_.resize(needed, std::vector<double>(dynamics_.size()));
    return {action_value(belief, c, Action::on, depth), action_value(belief, c, Action::off, depth)};
}

PolicyDecision ForwardSearch::decide(std::span<const double> belief, Context c) {
    const ActionValues v = evaluate(belief, c, params_.horizon);
    const Action a = v.on - v.off > kTieEpsilon ? Action::on : Action::off;
    return {a, v};
}

double ForwardSearch::node_value(std::span<const double> belief, Context c, int depth) {
    if (depth == 0) return 0.0;
    return std::max(action_value(belief, c, Action::on, depth),
                    action_value(belief, c, Action::off, depth));
}

double ForwardSearch::action_value(std::span<const double> belief, Context c, Action a,
                                   int depth) {
    return view_ == ContextView::current ? action_value_known(belief, c, a, depth)
                                         : action_value_previous(belief, c, a, depth);
}

double ForwardSearch::action_value_known(std::span<const double> belief, Context c, Action a,
                                         int depth) {
    const double p_correct = dynamics_.prob_correct(belief, c, a);
    const double immediate = reward(p_correct);
    if (depth == 1) return immediate;

    const double stay = 1.0 - params_.phi;
    double future = 0.0;
    for (Decision d : {Decision::correct, Decision::incorrect}) {
        auto& posterior = scratch_[2 * static_cast<std::size_t>(depth) + static_cast<std::size_t>(d)];
        const double p_obs = dynamics_.propagate(belief, c, a, d, posterior);
        if (!(p_obs > 0.0)) continue;
        double cont = 0.0;
        if (stay > 0.0) cont += stay * node_value(posterior, c, depth - 1);
        if (params_.phi > 0.0) cont += params_.phi * node_value(posterior, flip(c), depth - 1);
        future += p_obs * cont;
    }
    return immediate + params_.gamma * future;
}

double ForwardSearch::action_value_previous(std::span<const double> belief, Context last,
                                            Action a, int depth) {
    double value = 0.0;
    const std::pair<Context, double> branches[] = {{last, 1.0 - params_.phi},
                                                   {flip(last), params_.phi}};
    for (const auto& [c, p_context] : branches) {
        if (!(p_context > 0.0)) continue;
        double q = reward(dynamics_.prob_correct(belief, c, a));
        if (depth > 1) {
            double future = 0.0;
            for (Decision d : {Decision::correct, Decision::incorrect}) {
                auto& posterior =
                    scratch_[2 * static_cast<std::size_t>(depth) + static_cast<std::size_t>(d)];
                const double p_obs = dynamics_.propagate(belief, c, a, d, posterior);
                if (!(p_obs > 0.0)) continue;
                future += p_obs * node_value(posterior, c, depth - 1);
            }
            q += params_.gamma * future;
        }
        value += p_context * q;
    }
    return value;
}

ActionValues forward_search_value(const Belief& belief, const ModelParams& params, Context c,
                                  int depth) {
    ForwardSearch search(params, ContextView::current);
    return search.evaluate(belief.mass, c, depth);
}

ActionValues forward_search_value_previous(const Belief& belief, const ModelParams& params,
                                           Context last_context, int depth) {
    ForwardSearch search(params, ContextView::previous);
    return search.evaluate(belief.mass, last_context, depth);
}

PolicyDecision select_action(PolicyKind policy, const Belief& belief, Context c,
                             const ModelParams& params, ContextView view) {
    switch (policy) {
        case PolicyKind::always_on: return {Action::on, std::nullopt};
        case PolicyKind::always_off: return {Action::off, std::nullopt};
        case PolicyKind::optimal: break;
    }
    ForwardSearch search(params, view);
    return search.decide(belief.mass, c);
}

}  // namespace engage
