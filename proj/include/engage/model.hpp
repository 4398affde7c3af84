#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace engage {

/// Task familiarity. Determines how often the human is right without help.
enum class Context : std::uint8_t { low, high };

/// Whether the AI shows advice at a step.
enum class Action : std::uint8_t { on, off };

enum class Decision : std::uint8_t { correct, incorrect };

enum class Adherence : std::uint8_t { adhered, ignored };

inline constexpr Context flip(Context c) noexcept {
    return c == Context::low ? Context::high : Context::low;
}

std::string_view to_string(Context c) noexcept;
std::string_view to_string(Action a) noexcept;
std::string_view to_string(Decision d) noexcept;
std::string_view to_string(Adherence z) noexcept;

/// Thrown for parameter vectors or inputs outside their legal domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Full parameter vector of the human model and the planner.
///
/// Defaults are the baseline used in the simulation studies: a human that is
/// always right in familiar contexts, right 30% of the time otherwise, and
/// whose engagement moves 30% of the way toward its target on each update.
struct ModelParams {
    double alpha_low = 0.3;   ///< P(correct | no advice, low familiarity)
    double alpha_high = 1.0;  ///< P(correct | no advice, high familiarity)
    double eta = 0.3;         ///< engagement adjustment rate
    double phi = 0.1;         ///< per-step context switch probability
    double gamma = 0.95;      ///< discount factor
    double r_correct = 1.0;
    double r_incorrect = 0.0;
    int grid_size = 20;       ///< K: engagement grid has K + 1 points
    int horizon = 4;          ///< planner lookahead depth

    /// Throws InvalidArgument naming the first offending field.
    void validate() const;
};

/// Ground-truth latent state of the simulated human.
struct HumanState {
    double theta = 1.0;
    std::optional<Adherence> last_adherence;
};

/// Everything sampled for one human step.
///
/// When advice is off there is no adherence draw and the counterfactual is
/// the decision itself. When advice is ignored the independent decision is
/// the counterfactual.
struct StepOutcome {
    Decision decision = Decision::correct;
    Decision counterfactual = Decision::correct;
    std::optional<Adherence> adherence;
    double theta_after = 0.0;
};

/// Random source shared by all sampling routines.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
/// Avoids std::uniform_real_distribution so draws are identical across
/// standard library implementations.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability p. p = 0 never fires, p = 1 always fires.
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// theta + (1 - theta) * eta, clamped to 1 against rounding.
double raise_engagement(double theta, double eta) noexcept;
/// theta * (1 - eta).
double lower_engagement(double theta, double eta) noexcept;

double prob_correct_no_ai(const ModelParams& params, Context c) noexcept;

/// Marginal P(correct) with advice on: adherence makes the step correct,
/// otherwise the human decides alone.
double prob_correct_with_ai(const ModelParams& params, Context c, double theta) noexcept;

/// Engagement update for one step. Throws InvalidArgument when the tuple
/// matches none of the update cases, which means the outcome violates the
/// StepOutcome invariants.
double update_engagement(const ModelParams& params, double theta, Action advice,
                         const StepOutcome& outcome);

StepOutcome sample_step(const ModelParams& params, Context c, double theta, Action advice,
                        Rng& rng);

Context sample_context_transition(const ModelParams& params, Context c, Rng& rng);

}  // namespace engage
