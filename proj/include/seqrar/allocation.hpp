#pragma once

#include "seqrar/core.hpp"
#include "seqrar/rng.hpp"

#include <vector>

namespace seqrar {

// Target proportion rho1 for arm 1. The two theta arguments are per-arm
// standard deviations for NeymanNormal and success probabilities for the
// binary kinds; FixedEqual ignores them.
double target_rho(AllocationKind kind, double theta1, double theta2);

// Same map evaluated at the true model parameters.
double target_rho(const TargetAllocation& allocation, const ResponseModel& model);

// Allocation function g(s, r) with exponent gamma >= 0: the probability of
// assigning arm 1 when its current proportion is s and its target is r.
// g(0,r) = 1 and g(1,r) = 0; the interior is evaluated in log space so extreme
// s cannot overflow.
double dbcd_g(double s, double r, double gamma);

// One permuted block of size 2*n0: exactly n0 patients per arm, uniformly
// shuffled.
std::vector<int> permuted_block_burn_in(int n0, Rng& rng);

// Probability that the next patient is assigned to arm 1 given the current
// state. Pure; next_assignment draws a Bernoulli against it.
double assignment_probability(const TrialState& state, const Design& design,
                              const TargetAllocation& allocation, ModelKind kind);

int next_assignment(const TrialState& state, const Design& design,
                    const TargetAllocation& allocation, ModelKind kind, Rng& rng);

} // namespace seqrar
