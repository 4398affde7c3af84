#include "engage/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace engage {

ThetaGrid::ThetaGrid(int grid_size) : grid_size_(grid_size) {
    if (grid_size < 2) throw InvalidArgument("grid_size must be at least 2");
}

std::size_t ThetaGrid::snap(double theta) const noexcept {
    const double scaled = std::clamp(theta, 0.0, 1.0) * grid_size_;
    const double lower = std::floor(scaled);
    auto i = static_cast<std::size_t>(lower);
    if (scaled - lower > 0.5) ++i;
    return std::min(i, static_cast<std::size_t>(grid_size_));
}

Belief Belief::point(const ThetaGrid& grid, double theta) {
    Belief b;
    b.mass.assign(grid.size(), 0.0);
    b.mass[grid.snap(theta)] = 1.0;
    return b;
}

Belief Belief::from_mass(std::vector<double> mass) {
    Belief b{std::move(mass)};
    if (b.mass.size() < 3) throw InvalidArgument("belief needs at least 3 grid points");
    if (!b.is_valid()) {
        throw InvalidArgument("belief masses must be nonnegative and sum to 1");
    }
    return b;
}

bool Belief::is_valid() const noexcept {
    double total = 0.0;
    for (double m : mass) {
        if (!std::isfinite(m) || m < 0.0) return false;
        total += m;
    }
    return std::abs(total - 1.0) <= kSumTolerance;
}

Belief initial_belief(const ThetaGrid& grid) { return Belief::point(grid, 1.0); }

double expected_theta(const Belief& belief, const ThetaGrid& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < belief.mass.size(); ++i) acc += belief.mass[i] * grid.point(i);
    return acc;
}

BeliefDynamics::BeliefDynamics(const ModelParams& params)
    : params_(params), grid_(params.grid_size), up_(grid_.size()), down_(grid_.size()) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double g = grid_.point(i);
        up_[i] = grid_.snap(raise_engagement(g, params.eta));
        down_[i] = grid_.snap(lower_engagement(g, params.eta));
    }
}

bool BeliefDynamics::endpoints_stuck() const noexcept {
    const std::size_t last = grid_.size() - 1;
    return params_.eta > 0.0 && (down_[last] == last || up_[0] == 0);
}

double BeliefDynamics::prob_correct(std::span<const double> prior, Context c,
                                    Action advice) const noexcept {
    const double alone = prob_correct_no_ai(params_, c);
    if (advice == Action::off) return alone;
    double p = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
        p += prior[i] * prob_correct_with_ai(params_, c, grid_.point(i));
    }
    return p;
}

double BeliefDynamics::propagate(std::span<const double> prior, Context c, Action advice,
                                 Decision decision, std::span<double> out) const {
    const std::size_t n = grid_.size();
    std::fill(out.begin(), out.end(), 0.0);
    const double alone = prob_correct_no_ai(params_, c);

    if (advice == Action::off) {
        if (decision == Decision::correct) {
            std::copy(prior.begin(), prior.end(), out.begin());
            return alone;
        }
        for (std::size_t i = 0; i < n; ++i) out[up_[i]] += prior[i];
        return 1.0 - alone;
    }

    if (decision == Decision::incorrect) {
        // only consistent latent branch: ignored advice, independent mistake
        for (std::size_t i = 0; i < n; ++i) {
            out[up_[i]] += prior[i] * (1.0 - grid_.point(i)) * (1.0 - alone);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = grid_.point(i);
            const double b = prior[i];
            out[down_[i]] += b * theta * alone;           // adhered, would have been right
            out[up_[i]] += b * theta * (1.0 - alone);     // adhered, advice fixed a mistake
            out[down_[i]] += b * (1.0 - theta) * alone;   // ignored, right anyway
        }
    }

    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (total > 0.0) {
        for (double& m : out) m /= total;
    }
    return total;
}

Belief update_belief(const Belief& belief, const ModelParams& params, Context c, Action advice,
                     const Observation& obs) {
    const BeliefDynamics dynamics(params);
    if (belief.mass.size() != dynamics.size()) {
        throw InvalidArgument("belief has " + std::to_string(belief.mass.size()) +
                              " points but grid_size implies " + std::to_string(dynamics.size()));
    }
    Belief next;
    next.mass.resize(dynamics.size());
    const double likelihood = dynamics.propagate(belief.mass, c, advice, obs.decision, next.mass);
    if (!(likelihood > 0.0)) {
        throw ImpossibleObservation(std::string("decision '") +
                                    std::string(to_string(obs.decision)) +
                                    "' has zero probability under the current belief");
    }
    return next;
}

}  // namespace engage
