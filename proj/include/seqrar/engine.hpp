#pragma once

#include "seqrar/core.hpp"
#include "seqrar/inference.hpp"

#include <cstdint>
#include <vector>

namespace seqrar {

struct TrialResult {
    bool rejected = false;
    int rejection_look = 0; // 1-based; 0 when the trial ran to the end
    long enrolled_at_stop = 0;
    double rho1_at_stop = 0.0;  // N1 / enrolled at the stopping look
    double rho1_reported = 0.0; // per the scenario's rho_report convention
    long total_failures = -1;   // binary models only; -1 otherwise
    bool variance_warning = false; // some look hit the variance floor
    std::vector<LookStatistic> looks;
};

struct RunOptions {
    int threads = 0; // 0 = all available; 1 = serial reference path
};

// Arm that receives the remaining patients after an early stop: the higher
// observed success proportion, ties to arm 1.
int policy_arm(const TrialState& state);

// One seeded trial: burn-in, adaptive assignment, immediate responses, and a
// two-sided test at every scheduled look. Early rejection stops enrollment;
// under the remaining-patient policy the unenrolled remainder is assigned to
// the arm with the higher observed success proportion and only its failures
// are added to the count.
TrialResult run_trial(const Scenario& scenario, const BoundarySet& boundaries,
                      std::uint64_t seed);

// Monte Carlo aggregation over replications; replication i is seeded with
// derive_seed(master_seed, i), so the report does not depend on execution
// order or thread count.
AggregateReport monte_carlo(const Scenario& scenario, const BoundarySet& boundaries,
                            long replications, std::uint64_t master_seed,
                            const RunOptions& opts = {});

// Serial reference implementation; monte_carlo with more than one thread must
// reproduce it bit for bit.
AggregateReport monte_carlo_serial(const Scenario& scenario, const BoundarySet& boundaries,
                                   long replications, std::uint64_t master_seed);

// Empirical check of the joint law of the interim statistics: means and
// correlations of (Z_{t_1},...,Z_{t_K}) against mu*sqrt(n t_k) and
// sqrt(n_i/n_j), with no early stopping applied.
struct DiagnosticsReport {
    std::vector<double> info_times;
    std::vector<double> empirical_mean;
    std::vector<double> theoretical_mean;
    std::vector<std::vector<double>> empirical_corr;
    std::vector<std::vector<double>> theoretical_corr;
    double max_mean_dev = 0.0;
    double max_corr_dev = 0.0;
    double mu = 0.0;
    long replications = 0;
    std::uint64_t master_seed = 0;
};

DiagnosticsReport canonical_diagnostics(const Scenario& scenario, long replications,
                                        std::uint64_t master_seed,
                                        const RunOptions& opts = {});

} // namespace seqrar
