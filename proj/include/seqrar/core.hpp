#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqrar {

enum class ModelKind { Normal, Binary };
enum class AllocationKind { NeymanNormal, NeymanBinary, RSIHROptimal, Urn, FixedEqual };
enum class DesignKind { DBCD, CompleteRandomization };
enum class SpendingKind { OBFLike, Linear, PocockLike, Fixed };
enum class TestEstimator { Raw, Modified };
// Allocation proportion reported per replication: N1/enrolled at stopping, or
// N1(n)/n with the randomization continued past an early stop (the continued
// patients are bookkeeping only; failures still follow the stop-and-reassign
// policy).
enum class RhoReport { AtStop, FullHorizon };

// Per-arm outcome parameters. Normal arms use (mean, sd), binary arms use p.
struct ArmParams {
    double mean = 0.0;
    double sd = 1.0;
    double p = 0.5;
};

struct ResponseModel {
    ModelKind kind = ModelKind::Binary;
    ArmParams arm1;
    ArmParams arm2;
};

struct TargetAllocation {
    AllocationKind kind = AllocationKind::FixedEqual;
};

struct Design {
    DesignKind kind = DesignKind::CompleteRandomization;
    double gamma = 2.0;        // allocation-function exponent (DBCD)
    int burn_in_per_arm = 25;  // n0: patients per arm in the initial block (DBCD)
    double prior_center = 0.5; // added to each coordinate of the running estimator
};

// Interim analysis points as cumulative patient counts; the last entry is the
// maximum sample size n and information times are derived as n_k / n.
struct LookSchedule {
    std::vector<int> look_sizes;

    int total_n() const { return look_sizes.empty() ? 0 : look_sizes.back(); }
    std::size_t size() const { return look_sizes.size(); }
    double info_time(std::size_t k) const {
        return static_cast<double>(look_sizes[k]) / static_cast<double>(total_n());
    }
    std::vector<double> info_times() const {
        std::vector<double> t(look_sizes.size());
        for (std::size_t k = 0; k < look_sizes.size(); ++k) t[k] = info_time(k);
        return t;
    }
};

// Two-sided critical values on the Z scale, one per look.
// An entry of +infinity means the look spends nothing and is skipped.
struct BoundarySet {
    std::vector<double> critical_values;
    std::vector<double> cumulative_spend; // empty when values were given directly
    double total_alpha = 0.05;
};

// Cumulative type I error spent by information time t. Fixed carries
// externally supplied critical values instead of a formula.
struct SpendingFunction {
    SpendingKind kind = SpendingKind::Linear;
    double total_alpha = 0.05;
    std::vector<double> fixed_values; // Fixed only
    std::string label;                // optional report name override
};

// Running record of one trial: per-arm tallies plus full histories.
struct TrialState {
    long n1 = 0;
    long n2 = 0;
    double sum1 = 0.0;
    double sum2 = 0.0;
    double sumsq1 = 0.0;
    double sumsq2 = 0.0;
    std::vector<std::uint8_t> assignments; // arm labels, 1 or 2
    std::vector<double> responses;

    long enrolled() const { return n1 + n2; }

    void record(int arm, double y) {
        if (arm == 1) {
            ++n1;
            sum1 += y;
            sumsq1 += y * y;
        } else {
            ++n2;
            sum2 += y;
            sumsq2 += y * y;
        }
        assignments.push_back(static_cast<std::uint8_t>(arm));
        responses.push_back(y);
    }
};

struct Scenario {
    std::string id = "scenario";
    ResponseModel model;
    Design design;
    TargetAllocation allocation;
    LookSchedule schedule;
    SpendingFunction spending;
    long replications = 5000;
    std::uint64_t master_seed = 1;
    bool remaining_patient_policy = false;
    // Estimator feeding the test statistic; allocation always uses the
    // prior-centered running estimator regardless.
    TestEstimator test_estimator = TestEstimator::Raw;
    RhoReport rho_report = RhoReport::AtStop;
};

// Monte Carlo summary over replications of one scenario configuration.
struct AggregateReport {
    double rejection_rate = 0.0;
    std::vector<long> rejections_by_look;
    double rho1_mean = 0.0;
    double rho1_sd = 0.0;
    bool has_failures = false;
    double failures_mean = 0.0;
    double failures_sd = 0.0;
    long replications = 0;
    std::uint64_t master_seed = 0;
};

// Checks every field-level invariant and returns the complete list of
// violations; an empty list means the scenario is runnable.
std::vector<std::string> validate_scenario(const Scenario& s);

const char* to_string(ModelKind k);
const char* to_string(AllocationKind k);
const char* to_string(DesignKind k);
const char* to_string(SpendingKind k);

} // namespace seqrar
