#include "seqrar/allocation.hpp"

#include "seqrar/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace seqrar {

double target_rho(AllocationKind kind, double theta1, double theta2) {
    double num = 0.0, den = 0.0;
    switch (kind) {
        case AllocationKind::FixedEqual:
            return 0.5;
        case AllocationKind::NeymanNormal:
            num = theta1;
            den = theta1 + theta2;
            break;
        case AllocationKind::NeymanBinary: {
            const double s1 = std::sqrt(theta1 * (1.0 - theta1));
            const double s2 = std::sqrt(theta2 * (1.0 - theta2));
            num = s1;
            den = s1 + s2;
            break;
        }
        case AllocationKind::RSIHROptimal:
            num = std::sqrt(theta1);
            den = std::sqrt(theta1) + std::sqrt(theta2);
            break;
        case AllocationKind::Urn:
            num = 1.0 - theta2;
            den = (1.0 - theta1) + (1.0 - theta2);
            break;
    }
    if (!(den > 0.0)) throw std::domain_error("allocation undefined");
    const double rho = num / den;
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("allocation undefined");
    return rho;
}

double target_rho(const TargetAllocation& allocation, const ResponseModel& model) {
    if (allocation.kind == AllocationKind::NeymanNormal)
        return target_rho(allocation.kind, model.arm1.sd, model.arm2.sd);
    return target_rho(allocation.kind, model.arm1.p, model.arm2.p);
}

double dbcd_g(double s, double r, double gamma) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    // log of r(r/s)^g and (1-r)((1-r)/(1-s))^g; their gap feeds a logistic
    const double la = std::log(r) + gamma * (std::log(r) - std::log(s));
    const double lb = std::log1p(-r) + gamma * (std::log1p(-r) - std::log1p(-s));
    return 1.0 / (1.0 + std::exp(lb - la));
}

std::vector<int> permuted_block_burn_in(int n0, Rng& rng) {
    if (n0 < 1) throw std::invalid_argument("permuted_block_burn_in: n0 < 1");
    std::vector<int> block(static_cast<std::size_t>(2 * n0));
    for (int i = 0; i < n0; ++i) {
        block[static_cast<std::size_t>(i)] = 1;
        block[static_cast<std::size_t>(n0 + i)] = 2;
    }
    rng.shuffle(block);
    return block;
}

double assignment_probability(const TrialState& state, const Design& design,
                              const TargetAllocation& allocation, ModelKind kind) {
    if (design.kind == DesignKind::CompleteRandomization) return 0.5;
    const long m = state.enrolled();
    if (m < 2L * design.burn_in_per_arm)
        throw std::logic_error("assignment_probability: burn-in not complete");
    const auto [t1, t2] = allocation_theta(state, kind, design.prior_center);
    const double rho = target_rho(allocation.kind, t1, t2);
    const double s = static_cast<double>(state.n1) / static_cast<double>(m);
    return dbcd_g(s, rho, design.gamma);
}

int next_assignment(const TrialState& state, const Design& design,
                    const TargetAllocation& allocation, ModelKind kind, Rng& rng) {
    const double p = assignment_probability(state, design, allocation, kind);
    return rng.bernoulli(p) ? 1 : 2;
}

} // namespace seqrar
