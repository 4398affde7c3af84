#include "engage/model.hpp"

#include <algorithm>
#include <cmath>

namespace engage {

std::string_view to_string(Context c) noexcept { return c == Context::low ? "low" : "high"; }
std::string_view to_string(Action a) noexcept { return a == Action::on ? "on" : "off"; }
std::string_view to_string(Decision d) noexcept {
    return d == Decision::correct ? "correct" : "incorrect";
}
std::string_view to_string(Adherence z) noexcept {
    return z == Adherence::adhered ? "adhered" : "ignored";
}

namespace {

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void require_probability(double x, const char* name) {
    if (!is_probability(x)) {
        throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
    }
}

}  // namespace

double raise_engagement(double theta, double eta) noexcept {
    return std::min(1.0, theta + (1.0 - theta) * eta);
}

double lower_engagement(double theta, double eta) noexcept { return theta * (1.0 - eta); }

void ModelParams::validate() const {
    require_probability(alpha_low, "alpha_low");
    require_probability(alpha_high, "alpha_high");
    require_probability(eta, "eta");
    require_probability(phi, "phi");
    require_probability(gamma, "gamma");
    if (!std::isfinite(r_correct) || !std::isfinite(r_incorrect) || !(r_correct > r_incorrect)) {
        throw InvalidArgument("r_correct must be finite and greater than r_incorrect");
    }
    if (grid_size < 2) throw InvalidArgument("grid_size must be at least 2");
    if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
}

double prob_correct_no_ai(const ModelParams& params, Context c) noexcept {
    return c == Context::high ? params.alpha_high : params.alpha_low;
}

double prob_correct_with_ai(const ModelParams& params, Context c, double theta) noexcept {
    return theta + (1.0 - theta) * prob_correct_no_ai(params, c);
}

double update_engagement(const ModelParams& params, double theta, Action advice,
                         const StepOutcome& outcome) {
    require_probability(theta, "theta");
    const double eta = params.eta;
    const bool correct = outcome.decision == Decision::correct;
    const bool cf_correct = outcome.counterfactual == Decision::correct;

    if (advice == Action::off) {
        if (outcome.adherence || outcome.counterfactual != outcome.decision) {
            throw InvalidArgument("advice off: outcome must have no adherence and counterfactual == decision");
        }
        return correct ? theta : raise_engagement(theta, eta);
    }

    if (!outcome.adherence) throw InvalidArgument("advice on: outcome is missing adherence");
    const bool adhered = *outcome.adherence == Adherence::adhered;

    if (correct && cf_correct) return lower_engagement(theta, eta);  // redundant advice, either z
    if (adhered && correct && !cf_correct) return raise_engagement(theta, eta);
    if (!adhered && !correct && !cf_correct) return raise_engagement(theta, eta);

    throw InvalidArgument("outcome tuple is not covered by any engagement update case");
}

StepOutcome sample_step(const ModelParams& params, Context c, double theta, Action advice,
                        Rng& rng) {
    require_probability(theta, "theta");
    const double p_alone = prob_correct_no_ai(params, c);
    auto draw = [&] { return bernoulli(rng, p_alone) ? Decision::correct : Decision::incorrect; };

    StepOutcome out;
    if (advice == Action::off) {
        out.decision = draw();
        out.counterfactual = out.decision;
    } else if (bernoulli(rng, theta)) {
        out.adherence = Adherence::adhered;
        out.decision = Decision::correct;
        out.counterfactual = draw();
    } else {
        out.adherence = Adherence::ignored;
        out.decision = draw();
        out.counterfactual = out.decision;
    }
    out.theta_after = update_engagement(params, theta, advice, out);
    return out;
}

Context sample_context_transition(const ModelParams& params, Context c, Rng& rng) {
    return bernoulli(rng, params.phi) ? flip(c) : c;
}

}  // namespace engage
