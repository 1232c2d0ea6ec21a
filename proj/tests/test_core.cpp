#include "seqrar/core.hpp"

#include "seqrar/rng.hpp"
#include "seqrar/scenario_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

using namespace seqrar;

namespace {

Scenario binary_scenario() {
    Scenario s;
    s.id = "t";
    s.model.kind = ModelKind::Binary;
    s.model.arm1.p = 0.5;
    s.model.arm2.p = 0.625;
    s.design.kind = DesignKind::DBCD;
    s.design.gamma = 2.0;
    s.design.burn_in_per_arm = 25;
    s.allocation.kind = AllocationKind::RSIHROptimal;
    s.schedule.look_sizes = {100, 250, 500};
    s.spending.kind = SpendingKind::Linear;
    s.spending.total_alpha = 0.05;
    return s;
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& m) {
        return m.find(needle) != std::string::npos;
    });
}

} // namespace

TEST_CASE("a paper-style binary scenario validates cleanly") {
    CHECK(validate_scenario(binary_scenario()).empty());
}

TEST_CASE("boundary probability violations are reported by field") {
    Scenario s = binary_scenario();
    s.model.arm1.p = 0.0;
    const auto v = validate_scenario(s);
    REQUIRE(!v.empty());
    CHECK(mentions(v, "arm1.p out of (0,1)"));
}

TEST_CASE("burn-in must fit under the first look") {
    Scenario s = binary_scenario();
    s.design.burn_in_per_arm = 60;
    const auto v = validate_scenario(s);
    CHECK(mentions(v, "burn-in 120 >= first look 100"));
}

TEST_CASE("all violations are reported at once") {
    Scenario s = binary_scenario();
    s.model.arm1.p = -1.0;
    s.model.arm2.p = 2.0;
    s.design.gamma = -0.5;
    s.schedule.look_sizes = {100, 100, 500};
    s.spending.total_alpha = 1.5;
    s.replications = 0;
    const auto v = validate_scenario(s);
    CHECK(v.size() >= 6);
    CHECK(mentions(v, "arm1.p"));
    CHECK(mentions(v, "arm2.p"));
    CHECK(mentions(v, "gamma"));
    CHECK(mentions(v, "not strictly increasing"));
    CHECK(mentions(v, "total_alpha"));
    CHECK(mentions(v, "replications"));
}

TEST_CASE("failure policy is rejected on normal models") {
    Scenario s = binary_scenario();
    s.model.kind = ModelKind::Normal;
    s.model.arm1 = {1.0, 1.0, 0.5};
    s.model.arm2 = {1.0, 2.0, 0.5};
    s.allocation.kind = AllocationKind::NeymanNormal;
    s.remaining_patient_policy = true;
    const auto v = validate_scenario(s);
    CHECK(mentions(v, "remaining_patient_policy"));
}

TEST_CASE("allocation kinds must match the model family") {
    Scenario s = binary_scenario();
    s.allocation.kind = AllocationKind::NeymanNormal;
    CHECK(mentions(validate_scenario(s), "neyman_normal"));
    s = binary_scenario();
    s.model.kind = ModelKind::Normal;
    s.allocation.kind = AllocationKind::Urn;
    CHECK(mentions(validate_scenario(s), "binary model"));
}

TEST_CASE("fixed boundary values must match the schedule") {
    Scenario s = binary_scenario();
    s.spending.kind = SpendingKind::Fixed;
    s.spending.fixed_values = {2.0, 2.0};
    CHECK(mentions(validate_scenario(s), "length"));
}

TEST_CASE("validate_scenario is pure") {
    Scenario s = binary_scenario();
    s.model.arm1.p = 0.0;
    CHECK(validate_scenario(s) == validate_scenario(s));
}

TEST_CASE("scenario json round-trip preserves every field") {
    Scenario a = binary_scenario();
    a.spending.kind = SpendingKind::Fixed;
    a.spending.fixed_values = {4.877, 2.963, 1.969};
    a.spending.label = "obf";
    a.replications = 1234;
    a.master_seed = 987654321ULL;
    a.remaining_patient_policy = true;
    a.test_estimator = TestEstimator::Modified;
    a.rho_report = RhoReport::FullHorizon;
    CHECK(scenario_from_json(scenario_to_json(a)) == a);

    Scenario b = binary_scenario();
    b.model.kind = ModelKind::Normal;
    b.model.arm1 = {1.0, 1.0, 0.5};
    b.model.arm2 = {1.4, 2.0, 0.5};
    b.allocation.kind = AllocationKind::NeymanNormal;
    b.design.kind = DesignKind::CompleteRandomization;
    CHECK(scenario_from_json(scenario_to_json(b)) == b);
}

TEST_CASE("look schedule derives information times from patient counts") {
    LookSchedule ls;
    ls.look_sizes = {100, 250, 500};
    CHECK(ls.total_n() == 500);
    CHECK(ls.info_time(0) == doctest::Approx(0.2));
    CHECK(ls.info_time(1) == doctest::Approx(0.5));
    CHECK(ls.info_time(2) == doctest::Approx(1.0));
}

TEST_CASE("trial state tallies agree with its histories") {
    Rng rng(11);
    TrialState st;
    for (int i = 0; i < 500; ++i) {
        const int arm = rng.bernoulli(0.3) ? 1 : 2;
        st.record(arm, rng.normal());
    }
    CHECK(st.enrolled() == 500);
    CHECK(st.assignments.size() == 500);
    CHECK(st.responses.size() == 500);
    long n1 = 0, n2 = 0;
    double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
    for (std::size_t i = 0; i < st.responses.size(); ++i) {
        const double y = st.responses[i];
        if (st.assignments[i] == 1) {
            ++n1;
            s1 += y;
            q1 += y * y;
        } else {
            ++n2;
            s2 += y;
            q2 += y * y;
        }
    }
    CHECK(n1 == st.n1);
    CHECK(n2 == st.n2);
    CHECK(s1 == doctest::Approx(st.sum1).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(st.sum2).epsilon(1e-12));
    CHECK(q1 == doctest::Approx(st.sumsq1).epsilon(1e-12));
    CHECK(q2 == doctest::Approx(st.sumsq2).epsilon(1e-12));
}
