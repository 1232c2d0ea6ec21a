#include "seqrar/allocation.hpp"

#include "seqrar/boundaries.hpp"
#include "seqrar/engine.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace seqrar;

TEST_CASE("target proportions match their closed forms") {
    // sigma 1 vs 2 splits one third / two thirds
    CHECK(target_rho(AllocationKind::NeymanNormal, 1.0, 2.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(target_rho(AllocationKind::NeymanBinary, 0.3, 0.3) == doctest::Approx(0.5));
    // high-precision references (mpmath)
    CHECK(std::fabs(target_rho(AllocationKind::RSIHROptimal, 0.5, 0.625) -
                    0.47213595499957939) < 1e-12);
    CHECK(std::fabs(target_rho(AllocationKind::Urn, 0.917, 0.745) - 0.75443786982248521) <
          1e-12);
    CHECK(std::fabs(target_rho(AllocationKind::Urn, 0.5, 0.625) - 0.42857142857142857) <
          1e-12);
    CHECK(target_rho(AllocationKind::FixedEqual, 0.9, 0.1) == 0.5);
}

TEST_CASE("swapping the arms complements the proportion") {
    const AllocationKind kinds[] = {AllocationKind::NeymanNormal,
                                    AllocationKind::NeymanBinary,
                                    AllocationKind::RSIHROptimal, AllocationKind::Urn};
    for (auto kind : kinds) {
        for (double a = 0.05; a < 1.0; a += 0.13) {
            for (double b = 0.05; b < 1.0; b += 0.17) {
                const double t1 = kind == AllocationKind::NeymanNormal ? a * 3.0 : a;
                const double t2 = kind == AllocationKind::NeymanNormal ? b * 3.0 : b;
                const double r = target_rho(kind, t1, t2);
                CHECK(r > 0.0);
                CHECK(r < 1.0);
                CHECK(target_rho(kind, t2, t1) == doctest::Approx(1.0 - r).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("degenerate dispersions are rejected") {
    CHECK_THROWS_AS(target_rho(AllocationKind::NeymanBinary, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(target_rho(AllocationKind::NeymanNormal, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(target_rho(AllocationKind::RSIHROptimal, 0.0, 0.0), std::domain_error);
}

TEST_CASE("allocation function boundary cases are exact") {
    CHECK(dbcd_g(0.0, 0.3, 2.0) == 1.0);
    CHECK(dbcd_g(1.0, 0.3, 2.0) == 0.0);
    CHECK(dbcd_g(0.0, 0.5, 0.0) == 1.0);
}

TEST_CASE("allocation function fixes its target point") {
    const double gammas[] = {0.0, 1.0, 2.0, 5.0};
    for (double g : gammas)
        for (int i = 1; i <= 99; ++i) {
            const double r = i / 100.0;
            CHECK(std::fabs(dbcd_g(r, r, g) - r) < 1e-12);
        }
}

TEST_CASE("known value: s=0.4 r=0.5 gamma=2 gives 9/13") {
    CHECK(std::fabs(dbcd_g(0.4, 0.5, 2.0) - 0.69230769230769231) < 1e-12);
}

TEST_CASE("gamma=0 ignores the current proportion") {
    for (double s = 0.02; s < 1.0; s += 0.07)
        CHECK(dbcd_g(s, 0.37, 0.0) == doctest::Approx(0.37).epsilon(1e-13));
}

TEST_CASE("strict monotonicity on a 50x50 grid") {
    const double gamma = 2.0;
    for (int i = 1; i <= 50; ++i) {
        const double r = i / 51.0;
        double prev = dbcd_g(1.0 / 51.0, r, gamma);
        for (int j = 2; j <= 50; ++j) {
            const double g = dbcd_g(j / 51.0, r, gamma);
            CHECK(g < prev); // decreasing in s
            prev = g;
        }
    }
    for (int j = 1; j <= 50; ++j) {
        const double s = j / 51.0;
        double prev = dbcd_g(s, 1.0 / 51.0, gamma);
        for (int i = 2; i <= 50; ++i) {
            const double g = dbcd_g(s, i / 51.0, gamma);
            CHECK(g > prev); // increasing in r
            prev = g;
        }
    }
}

TEST_CASE("extreme proportions cannot overflow") {
    CHECK(dbcd_g(1e-12, 0.5, 5.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dbcd_g(1.0 - 1e-12, 0.5, 5.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isfinite(dbcd_g(1e-300, 0.99, 10.0)));
}

TEST_CASE("permuted block yields exact per-arm counts") {
    Rng rng(5);
    const auto block = permuted_block_burn_in(25, rng);
    REQUIRE(block.size() == 50);
    int ones = 0;
    for (int a : block) {
        REQUIRE((a == 1 || a == 2));
        if (a == 1) ++ones;
    }
    CHECK(ones == 25);
}

TEST_CASE("a block of two is a fair coin over seeds") {
    int first_is_one = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        Rng rng(seed);
        const auto block = permuted_block_burn_in(1, rng);
        REQUIRE(block.size() == 2);
        REQUIRE(block[0] != block[1]);
        if (block[0] == 1) ++first_is_one;
    }
    CHECK(first_is_one > 850);
    CHECK(first_is_one < 1150);
}

TEST_CASE("block burn-in is reproducible for a fixed seed") {
    Rng a(123), b(123);
    CHECK(permuted_block_burn_in(10, a) == permuted_block_burn_in(10, b));
}

TEST_CASE("complete randomization assigns at one half regardless of state") {
    Design d;
    d.kind = DesignKind::CompleteRandomization;
    TargetAllocation alloc{AllocationKind::FixedEqual};
    TrialState st;
    CHECK(assignment_probability(st, d, alloc, ModelKind::Binary) == 0.5);
    st.record(1, 1.0);
    st.record(1, 1.0);
    st.record(1, 0.0);
    CHECK(assignment_probability(st, d, alloc, ModelKind::Binary) == 0.5);
}

TEST_CASE("adaptive assignment composes the estimator, target, and g") {
    Design d;
    d.kind = DesignKind::DBCD;
    d.gamma = 2.0;
    d.burn_in_per_arm = 25;
    d.prior_center = 0.5;
    TargetAllocation alloc{AllocationKind::RSIHROptimal};
    // 20/40 and 30/60 successes put both prior-centered estimates at exactly
    // 0.5, so the target is 0.5 while the current proportion is 0.4
    TrialState st;
    st.n1 = 40;
    st.sum1 = 20.0;
    st.sumsq1 = 20.0;
    st.n2 = 60;
    st.sum2 = 30.0;
    st.sumsq2 = 30.0;
    const double p = assignment_probability(st, d, alloc, ModelKind::Binary);
    CHECK(std::fabs(p - 0.69230769230769231) < 1e-12);
}

TEST_CASE("adaptive assignment refuses to run before burn-in completes") {
    Design d;
    d.kind = DesignKind::DBCD;
    d.burn_in_per_arm = 25;
    TrialState st;
    st.record(1, 1.0);
    TargetAllocation alloc{AllocationKind::RSIHROptimal};
    CHECK_THROWS_AS(assignment_probability(st, d, alloc, ModelKind::Binary),
                    std::logic_error);
}

TEST_CASE("long trials settle near the target proportion") {
    // sigma (1,2) targets one third; a 5000-patient trial should land within
    // 0.03 nearly always
    Scenario s;
    s.id = "conv";
    s.model.kind = ModelKind::Normal;
    s.model.arm1 = {1.0, 1.0, 0.5};
    s.model.arm2 = {1.0, 2.0, 0.5};
    s.design.kind = DesignKind::DBCD;
    s.design.gamma = 2.0;
    s.design.burn_in_per_arm = 25;
    s.allocation.kind = AllocationKind::NeymanNormal;
    s.schedule.look_sizes = {5000};
    s.spending.kind = SpendingKind::Fixed;
    s.spending.fixed_values = {50.0};
    BoundarySet bs = solve_boundaries(s.schedule, s.spending);

    int within = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
        const TrialResult r = run_trial(s, bs, derive_seed(2024, static_cast<std::uint64_t>(i)));
        if (std::fabs(r.rho1_at_stop - 1.0 / 3.0) < 0.03) ++within;
    }
    CHECK(within >= 297); // 99 percent
}
