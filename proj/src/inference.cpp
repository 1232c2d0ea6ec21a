#include "seqrar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqrar {

namespace {
constexpr double kSdFloor = 1e-8;
constexpr double kVarFloor = 1e-12;
} // namespace

double modified_mean(double sum, long count, double prior_center) {
    return (sum + prior_center) / static_cast<double>(count + 1);
}

std::pair<double, double> allocation_theta(const TrialState& state, ModelKind kind,
                                           double prior_center) {
    if (kind == ModelKind::Binary) {
        return {modified_mean(state.sum1, state.n1, prior_center),
                modified_mean(state.sum2, state.n2, prior_center)};
    }
    // Normal: sd from prior-centered first and second moments
    const double m1 = modified_mean(state.sum1, state.n1, prior_center);
    const double m2 = modified_mean(state.sum2, state.n2, prior_center);
    const double q1 = modified_mean(state.sumsq1, state.n1, prior_center);
    const double q2 = modified_mean(state.sumsq2, state.n2, prior_center);
    const double sd1 = std::sqrt(std::max(q1 - m1 * m1, 0.0));
    const double sd2 = std::sqrt(std::max(q2 - m2 * m2, 0.0));
    return {std::max(sd1, kSdFloor), std::max(sd2, kSdFloor)};
}

ArmEstimate arm_estimate(long count, double sum, double sumsq, ModelKind kind,
                         TestEstimator est, double prior_center) {
    ArmEstimate e;
    e.count = count;
    if (est == TestEstimator::Modified) {
        e.mean = modified_mean(sum, count, prior_center);
        if (kind == ModelKind::Binary) {
            e.variance = e.mean * (1.0 - e.mean);
        } else {
            const double q = modified_mean(sumsq, count, prior_center);
            e.variance = std::max(q - e.mean * e.mean, 0.0);
        }
        return e;
    }
    if (count <= 0) throw std::invalid_argument("arm_estimate: empty arm");
    e.mean = sum / static_cast<double>(count);
    if (kind == ModelKind::Binary) {
        e.variance = e.mean * (1.0 - e.mean);
    } else {
        if (count < 2) throw std::invalid_argument("arm_estimate: normal arm needs >= 2");
        e.variance = std::max((sumsq - static_cast<double>(count) * e.mean * e.mean) /
                                  static_cast<double>(count - 1),
                              0.0);
    }
    return e;
}

LookStatistic z_statistic(const TrialState& state, ModelKind kind, int look,
                          double info_time, TestEstimator est, double prior_center) {
    const ArmEstimate a = arm_estimate(state.n1, state.sum1, state.sumsq1, kind, est, prior_center);
    const ArmEstimate b = arm_estimate(state.n2, state.sum2, state.sumsq2, kind, est, prior_center);

    LookStatistic ls;
    ls.look = look;
    ls.info_time = info_time;
    ls.n1 = state.n1;
    ls.n2 = state.n2;

    double pooled = a.variance / static_cast<double>(a.count) +
                    b.variance / static_cast<double>(b.count);
    if (pooled < kVarFloor) {
        pooled = kVarFloor;
        ls.degenerate_variance = true;
    }
    ls.z = (a.mean - b.mean) / std::sqrt(pooled);
    ls.b = std::sqrt(info_time) * ls.z;
    return ls;
}

double drift_mu(const ResponseModel& model, double rho1) {
    if (!(rho1 > 0.0 && rho1 < 1.0))
        throw std::domain_error("drift_mu: rho1 outside (0,1)");
    double diff, v1, v2;
    if (model.kind == ModelKind::Normal) {
        diff = model.arm1.mean - model.arm2.mean;
        v1 = model.arm1.sd * model.arm1.sd / rho1;
        v2 = model.arm2.sd * model.arm2.sd / (1.0 - rho1);
    } else {
        diff = model.arm1.p - model.arm2.p;
        v1 = model.arm1.p * (1.0 - model.arm1.p) / rho1;
        v2 = model.arm2.p * (1.0 - model.arm2.p) / (1.0 - rho1);
    }
    return diff / std::sqrt(v1 + v2);
}

} // namespace seqrar
