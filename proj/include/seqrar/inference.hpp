#pragma once

#include "seqrar/core.hpp"

#include <utility>

namespace seqrar {

// One arm's estimates at a look.
struct ArmEstimate {
    double mean = 0.0;     // sample mean / proportion (raw or prior-centered)
    double variance = 0.0; // unbiased sample variance (normal) or p(1-p) (binary)
    long count = 0;
};

// Test statistic at one interim look.
struct LookStatistic {
    int look = 0;          // 1-based index k
    double info_time = 0.0;
    double z = 0.0;
    double b = 0.0;        // sqrt(t) * z
    long n1 = 0;
    long n2 = 0;
    bool degenerate_variance = false; // a variance floor was applied
};

// Prior-centered running mean: (sum + center) / (count + 1). Defined at
// count == 0, where it returns the center.
double modified_mean(double sum, long count, double prior_center);

// Per-arm parameter estimates feeding the allocation target: (p1, p2) for
// binary models, (sd1, sd2) for normal ones. Always strictly valid inputs for
// the target map: binary estimates are strictly inside (0,1) by construction
// and normal sds are floored at 1e-8.
std::pair<double, double> allocation_theta(const TrialState& state, ModelKind kind,
                                           double prior_center);

ArmEstimate arm_estimate(long count, double sum, double sumsq, ModelKind kind,
                         TestEstimator est, double prior_center);

// Two-sample Z at a look. A zero pooled variance is floored at 1e-12 and
// flagged instead of aborting the replication.
LookStatistic z_statistic(const TrialState& state, ModelKind kind, int look,
                          double info_time, TestEstimator est = TestEstimator::Raw,
                          double prior_center = 0.5);

// Standardized effect size: the mean of B_t - sqrt(n)*mu*t vanishes under the
// alternative when mu is this value. Zero under the null.
double drift_mu(const ResponseModel& model, double rho1);

} // namespace seqrar
