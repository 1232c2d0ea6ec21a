// Throughput comparison: serial reference loop vs the OpenMP Monte Carlo
// kernel, checking that both produce the same report.

#include "seqrar/boundaries.hpp"
#include "seqrar/engine.hpp"
#include "seqrar/scenario_io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace seqrar;

namespace {

Scenario default_scenario() {
    Scenario s;
    s.id = "bench";
    s.model.kind = ModelKind::Binary;
    s.model.arm1.p = 0.5;
    s.model.arm2.p = 0.625;
    s.design.kind = DesignKind::DBCD;
    s.design.gamma = 2.0;
    s.design.burn_in_per_arm = 25;
    s.allocation.kind = AllocationKind::RSIHROptimal;
    s.schedule.look_sizes = {100, 250, 500};
    s.spending.kind = SpendingKind::Fixed;
    s.spending.fixed_values = {4.877, 2.963, 1.969};
    s.spending.total_alpha = 0.05;
    s.remaining_patient_policy = true;
    s.master_seed = 7;
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const AggregateReport& a, const AggregateReport& b) {
    return a.rejection_rate == b.rejection_rate && a.rejections_by_look == b.rejections_by_look &&
           a.rho1_mean == b.rho1_mean && a.rho1_sd == b.rho1_sd &&
           a.failures_mean == b.failures_mean && a.failures_sd == b.failures_sd;
}

} // namespace

int main(int argc, char** argv) {
    long reps = 20000;
    std::string scenario_path;
    if (argc > 1) reps = std::atol(argv[1]);
    if (argc > 2) scenario_path = argv[2];

    Scenario s = scenario_path.empty() ? default_scenario()
                                       : load_scenario_file(scenario_path).rows.front();
    const BoundarySet bs = solve_boundaries(s.schedule, s.spending);

    std::printf("scenario %s, %ld replications of up to %d patients\n", s.id.c_str(), reps,
                s.schedule.total_n());

    auto t0 = std::chrono::steady_clock::now();
    const AggregateReport serial = monte_carlo_serial(s, bs, reps, s.master_seed);
    const double t_serial = seconds_since(t0);

    RunOptions opts; // all cores
    t0 = std::chrono::steady_clock::now();
    const AggregateReport parallel = monte_carlo(s, bs, reps, s.master_seed, opts);
    const double t_parallel = seconds_since(t0);

    std::printf("serial   : %8.3f s  (%.0f trials/s)\n", t_serial, reps / t_serial);
    std::printf("parallel : %8.3f s  (%.0f trials/s)\n", t_parallel, reps / t_parallel);
    std::printf("speedup  : %8.2fx\n", t_serial / t_parallel);

    if (!identical(serial, parallel)) {
        std::printf("FAIL: parallel report differs from serial reference\n");
        return 1;
    }
    std::printf("reports identical: rejection_rate=%.4f rho1=%.4f\n", serial.rejection_rate,
                serial.rho1_mean);
    return 0;
}
