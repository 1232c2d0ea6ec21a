#include "seqrar/core.hpp"

#include <cmath>
#include <sstream>

namespace seqrar {

namespace {

bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

void check_model(const Scenario& s, std::vector<std::string>& out) {
    const auto& m = s.model;
    if (m.kind == ModelKind::Binary) {
        if (!in_open_unit(m.arm1.p)) out.push_back("model.arm1.p out of (0,1)");
        if (!in_open_unit(m.arm2.p)) out.push_back("model.arm2.p out of (0,1)");
    } else {
        if (!(m.arm1.sd > 0.0)) out.push_back("model.arm1.sd must be > 0");
        if (!(m.arm2.sd > 0.0)) out.push_back("model.arm2.sd must be > 0");
    }
}

void check_allocation(const Scenario& s, std::vector<std::string>& out) {
    const auto k = s.allocation.kind;
    const bool binary_target = k == AllocationKind::NeymanBinary ||
                               k == AllocationKind::RSIHROptimal ||
                               k == AllocationKind::Urn;
    if (s.model.kind == ModelKind::Normal && binary_target)
        out.push_back("allocation kind requires a binary model");
    if (s.model.kind == ModelKind::Binary && k == AllocationKind::NeymanNormal)
        out.push_back("allocation neyman_normal requires a normal model");
}

void check_design(const Scenario& s, std::vector<std::string>& out) {
    const auto& d = s.design;
    if (d.kind != DesignKind::DBCD) return;
    if (!(d.gamma >= 0.0)) out.push_back("design.gamma must be >= 0");
    if (d.burn_in_per_arm < 1) out.push_back("design.burn_in_per_arm must be >= 1");
    if (!s.schedule.look_sizes.empty() && d.burn_in_per_arm >= 1) {
        const int first = s.schedule.look_sizes.front();
        const int burn = 2 * d.burn_in_per_arm;
        if (burn >= first) {
            std::ostringstream msg;
            msg << "burn-in " << burn << " >= first look " << first;
            out.push_back(msg.str());
        }
    }
    if (!std::isfinite(d.prior_center)) out.push_back("design.prior_center must be finite");
}

void check_schedule(const Scenario& s, std::vector<std::string>& out) {
    const auto& ls = s.schedule.look_sizes;
    if (ls.empty()) {
        out.push_back("schedule.look_sizes is empty");
        return;
    }
    if (ls.front() <= 0) out.push_back("schedule.look_sizes must be positive");
    for (std::size_t k = 1; k < ls.size(); ++k) {
        if (ls[k] <= ls[k - 1]) {
            out.push_back("schedule.look_sizes not strictly increasing");
            break;
        }
    }
}

void check_spending(const Scenario& s, std::vector<std::string>& out) {
    const auto& sp = s.spending;
    if (!(sp.total_alpha > 0.0 && sp.total_alpha < 1.0))
        out.push_back("spending.total_alpha out of (0,1)");
    if (sp.kind == SpendingKind::Fixed) {
        if (sp.fixed_values.size() != s.schedule.size())
            out.push_back("spending.values length != number of looks");
        for (double b : sp.fixed_values)
            if (!(b > 0.0)) out.push_back("spending.values must be positive");
    }
}

} // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> out;
    check_model(s, out);
    check_allocation(s, out);
    check_schedule(s, out);
    check_design(s, out);
    check_spending(s, out);
    if (s.replications < 1) out.push_back("replications must be >= 1");
    if (s.remaining_patient_policy && s.model.kind == ModelKind::Normal)
        out.push_back("remaining_patient_policy requires a binary model (failures undefined)");
    return out;
}

const char* to_string(ModelKind k) {
    return k == ModelKind::Normal ? "normal" : "binary";
}

const char* to_string(AllocationKind k) {
    switch (k) {
        case AllocationKind::NeymanNormal: return "neyman_normal";
        case AllocationKind::NeymanBinary: return "neyman_binary";
        case AllocationKind::RSIHROptimal: return "optimal";
        case AllocationKind::Urn: return "urn";
        case AllocationKind::FixedEqual: return "equal";
    }
    return "?";
}

const char* to_string(DesignKind k) {
    return k == DesignKind::DBCD ? "dbcd" : "cr";
}

const char* to_string(SpendingKind k) {
    switch (k) {
        case SpendingKind::OBFLike: return "obf";
        case SpendingKind::Linear: return "linear";
        case SpendingKind::PocockLike: return "pocock";
        case SpendingKind::Fixed: return "fixed";
    }
    return "?";
}

} // namespace seqrar
