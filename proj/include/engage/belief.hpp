#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "engage/model.hpp"

namespace engage {

/// Equally spaced engagement values 0 = g_0 < g_1 < ... < g_K = 1.
class ThetaGrid {
public:
    explicit ThetaGrid(int grid_size);

    int grid_size() const noexcept { return grid_size_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(grid_size_) + 1; }
    double point(std::size_t i) const noexcept {
        return static_cast<double>(i) / static_cast<double>(grid_size_);
    }
    /// Index of the nearest grid point; exact midpoints go to the lower one.
    std::size_t snap(double theta) const noexcept;

private:
    int grid_size_;
};

/// Probability mass over the points of a ThetaGrid.
struct Belief {
    std::vector<double> mass;

    static constexpr double kSumTolerance = 1e-12;

    /// All mass on the grid point nearest to theta.
    static Belief point(const ThetaGrid& grid, double theta);
    /// Validates and wraps an explicit mass vector. Throws InvalidArgument.
    static Belief from_mass(std::vector<double> mass);

    bool is_valid() const noexcept;

    friend bool operator==(const Belief&, const Belief&) = default;
};

/// What the AI sees after a step: the human's decision and the new context.
struct Observation {
    Decision decision = Decision::correct;
    Context next_context = Context::low;
};

/// Thrown when an observation has zero probability under the belief.
class ImpossibleObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum engagement: all mass on theta = 1.
Belief initial_belief(const ThetaGrid& grid);

double expected_theta(const Belief& belief, const ThetaGrid& grid);

/// Posterior-predictive belief over the next engagement value given the
/// step's context, the action taken and the observed decision. Adherence and
/// the counterfactual are marginalized out; every updated value is snapped
/// to the grid. Throws ImpossibleObservation on zero likelihood.
Belief update_belief(const Belief& belief, const ModelParams& params, Context c, Action advice,
                     const Observation& obs);

/// Precomputed grid transitions for one (grid_size, eta) pair.
///
/// `up[i]` and `down[i]` are the snapped indices of the engagement-increasing
/// and engagement-decreasing updates applied to grid point i.
class BeliefDynamics {
public:
    explicit BeliefDynamics(const ModelParams& params);

    const ThetaGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }

    /// Writes the posterior of `prior` into `out` (same size, overwritten)
    /// and returns the observation likelihood P(decision | prior, c, advice).
    /// `out` is meaningful only when the likelihood is positive. With advice
    /// off the likelihood does not depend on engagement, so mass is moved
    /// without reweighting.
    double propagate(std::span<const double> prior, Context c, Action advice, Decision decision,
                     std::span<double> out) const;

    /// True when a nonzero eta cannot move mass off an endpoint of the grid:
    /// the updates from 1 or 0 snap back to where they started. The belief
    /// then cannot follow a continuous engagement state (needs eta >= 1 / 2K).
    bool endpoints_stuck() const noexcept;

    /// P(correct) under `prior` for the given action.
    double prob_correct(std::span<const double> prior, Context c, Action advice) const noexcept;

private:
    ModelParams params_;
    ThetaGrid grid_;
    std::vector<std::size_t> up_;
    std::vector<std::size_t> down_;
};

}  // namespace engage
