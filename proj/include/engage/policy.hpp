#pragma once

#include <optional>
#include <string_view>

#include "engage/belief.hpp"
#include "engage/model.hpp"

namespace engage {

enum class PolicyKind : std::uint8_t { optimal, always_on, always_off };

std::string_view to_string(PolicyKind p) noexcept;
/// Accepts "optimal", "always_on", "always_off". Throws InvalidArgument.
PolicyKind parse_policy(std::string_view name);

/// What the AI knows about the context when it chooses an action.
///
/// `current`: the step's context is shown before acting.
/// `previous`: the context is observed together with the decision, after
/// acting, so the policy plans from the last context it saw and the step's
/// context is one switch draw away.
enum class ContextView : std::uint8_t { current, previous };

std::string_view to_string(ContextView v) noexcept;
/// Accepts "current", "previous". Throws InvalidArgument.
ContextView parse_context_view(std::string_view name);

/// Differences at or below this resolve to Action::off.
inline constexpr double kTieEpsilon = 1e-9;

struct ActionValues {
    double on = 0.0;
    double off = 0.0;
};

struct PolicyDecision {
    Action action = Action::off;
    /// Search values; baselines do not search and leave this empty.
    std::optional<ActionValues> values;
};

double expected_immediate_reward(const Belief& belief, const ModelParams& params, Context c,
                                 Action a);

/// Finite-horizon expectimax over actions, decisions and next contexts.
/// Leaves at depth 0 are worth 0.
ActionValues forward_search_value(const Belief& belief, const ModelParams& params, Context c,
                                  int depth);

/// Same search when the step's context is not yet known: `last_context` is
/// the most recent observed context and the step's context is drawn from it
/// with switch probability phi at every level of the tree.
ActionValues forward_search_value_previous(const Belief& belief, const ModelParams& params,
                                           Context last_context, int depth);

/// Baselines ignore belief and context. The optimal policy searches to
/// params.horizon and advises only when that is strictly better. `c` is read
/// according to `view`.
PolicyDecision select_action(PolicyKind policy, const Belief& belief, Context c,
                             const ModelParams& params, ContextView view = ContextView::current);

/// Reusable forward-search engine. Holds the precomputed grid transitions and
/// per-depth scratch buffers so repeated planning calls do not allocate.
/// Not thread-safe; use one instance per thread.
class ForwardSearch {
public:
    explicit ForwardSearch(const ModelParams& params, ContextView view = ContextView::current);

    ContextView view() const noexcept { return view_; }
    ActionValues evaluate(std::span<const double> belief, Context c, int depth);
    PolicyDecision decide(std::span<const double> belief, Context c);

private:
    double node_value(std::span<const double> belief, Context c, int depth);
    double action_value(std::span<const double> belief, Context c, Action a, int depth);
    double action_value_known(std::span<const double> belief, Context c, Action a, int depth);
    double action_value_previous(std::span<const double> belief, Context last, Action a,
                                 int depth);
    double reward(double p_correct) const noexcept {
        return p_correct * params_.r_correct + (1.0 - p_correct) * params_.r_incorrect;
    }

    ModelParams params_;
    ContextView view_;
    BeliefDynamics dynamics_;
    std::vector<std::vector<double>> scratch_;
};

}  // namespace engage
