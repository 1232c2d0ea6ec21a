#pragma once

#include "seqrar/core.hpp"

#include <vector>

namespace seqrar {

// Cumulative alpha spent at information time t in [0,1] for the analytic
// spending kinds (Fixed has no spending formula and is rejected).
double spend(const SpendingFunction& fn, double t);

struct CrossingResult {
    double overall = 0.0;
    std::vector<double> per_look;
};

// Two-sided critical values matching the cumulative spend targets under the
// canonical joint law: the per-look first-crossing probability of the
// zero-drift process equals each spend increment. Increments <= 0 produce a
// +infinity sentinel (look skipped); a decreasing spend vector is an error.
// The first look uses the closed form; later looks recurse the sub-density of
// the non-stopped process on `grid_points` trapezoid nodes and bisect.
BoundarySet solve_from_spends(const std::vector<double>& info_times,
                              const std::vector<double>& cumulative_spend,
                              double total_alpha, int grid_points = 512);

BoundarySet solve_boundaries(const LookSchedule& schedule, const SpendingFunction& fn,
                             int grid_points = 512);

// First-crossing probabilities of the drifted canonical process against the
// given two-sided boundaries; drift is the slope of E[B_t] per unit t
// (mu * sqrt(n)). Quadrature-exact, no simulation.
CrossingResult crossing_probability(const std::vector<double>& info_times,
                                    const std::vector<double>& critical_values,
                                    double drift, int grid_points = 512);

CrossingResult crossing_probability(const BoundarySet& boundaries,
                                    const LookSchedule& schedule, double drift,
                                    int grid_points = 512);

} // namespace seqrar
