#include "seqrar/engine.hpp"

#include "seqrar/allocation.hpp"
#include "seqrar/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seqrar {

namespace {

double draw_response(const ResponseModel& model, int arm, Rng& rng) {
    const ArmParams& a = (arm == 1) ? model.arm1 : model.arm2;
    if (model.kind == ModelKind::Normal) return a.mean + a.sd * rng.normal();
    return rng.bernoulli(a.p) ? 1.0 : 0.0;
}

struct Accumulator {
    long rejections = 0;
    std::vector<long> by_look;
    double rho_sum = 0.0, rho_sumsq = 0.0;
    double fail_sum = 0.0, fail_sumsq = 0.0;

    explicit Accumulator(std::size_t looks) : by_look(looks, 0) {}

    void add(const TrialResult& r) {
        if (r.rejected) {
            ++rejections;
            ++by_look[static_cast<std::size_t>(r.rejection_look - 1)];
        }
        rho_sum += r.rho1_reported;
        rho_sumsq += r.rho1_reported * r.rho1_reported;
        if (r.total_failures >= 0) {
            const double f = static_cast<double>(r.total_failures);
            fail_sum += f;
            fail_sumsq += f * f;
        }
    }
};

double sample_sd(double sum, double sumsq, long n) {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double ss = sumsq - static_cast<double>(n) * mean * mean;
    return std::sqrt(std::max(ss, 0.0) / static_cast<double>(n - 1));
}

AggregateReport reduce(const Scenario& scenario, const Accumulator& acc, long R,
                       std::uint64_t master_seed) {
    AggregateReport rep;
    rep.replications = R;
    rep.master_seed = master_seed;
    rep.rejection_rate = static_cast<double>(acc.rejections) / static_cast<double>(R);
    rep.rejections_by_look = acc.by_look;
    rep.rho1_mean = acc.rho_sum / static_cast<double>(R);
    rep.rho1_sd = sample_sd(acc.rho_sum, acc.rho_sumsq, R);
    if (scenario.model.kind == ModelKind::Binary) {
        rep.has_failures = true;
        rep.failures_mean = acc.fail_sum / static_cast<double>(R);
        rep.failures_sd = sample_sd(acc.fail_sum, acc.fail_sumsq, R);
    }
    return rep;
}

void check_run_inputs(const Scenario& scenario, const BoundarySet& boundaries) {
    if (boundaries.critical_values.size() != scenario.schedule.size())
        throw std::invalid_argument("run_trial: boundaries/schedule length mismatch");
    const auto violations = validate_scenario(scenario);
    if (!violations.empty())
        throw std::invalid_argument("run_trial: invalid scenario: " + violations.front());
}

} // namespace

// An arm with no patients cannot be "estimated better".
int policy_arm(const TrialState& st) {
    const double p1 = st.n1 > 0 ? st.sum1 / static_cast<double>(st.n1) : -1.0;
    const double p2 = st.n2 > 0 ? st.sum2 / static_cast<double>(st.n2) : -1.0;
    return p1 >= p2 ? 1 : 2;
}

TrialResult run_trial(const Scenario& scenario, const BoundarySet& boundaries,
                      std::uint64_t seed) {
    check_run_inputs(scenario, boundaries);

    const auto& looks = scenario.schedule.look_sizes;
    const int n = scenario.schedule.total_n();
    const bool dbcd = scenario.design.kind == DesignKind::DBCD;
    const int burn = dbcd ? 2 * scenario.design.burn_in_per_arm : 0;

    Rng rng(seed);
    TrialState st;
    st.assignments.reserve(static_cast<std::size_t>(n));
    st.responses.reserve(static_cast<std::size_t>(n));

    std::vector<int> block;
    if (dbcd) block = permuted_block_burn_in(scenario.design.burn_in_per_arm, rng);

    TrialResult out;
    std::size_t k = 0;
    long n1_at_stop = 0, failures_at_stop = 0;
    int better = 1;
    for (int m = 1; m <= n; ++m) {
        const int arm = (dbcd && m <= burn)
                            ? block[static_cast<std::size_t>(m - 1)]
                            : next_assignment(st, scenario.design, scenario.allocation,
                                              scenario.model.kind, rng);
        st.record(arm, draw_response(scenario.model, arm, rng));

        if (!out.rejected && k < looks.size() && m == looks[k]) {
            LookStatistic ls =
                z_statistic(st, scenario.model.kind, static_cast<int>(k) + 1,
                            scenario.schedule.info_time(k), scenario.test_estimator,
                            scenario.design.prior_center);
            out.looks.push_back(ls);
            out.variance_warning = out.variance_warning || ls.degenerate_variance;
            if (std::fabs(ls.z) >= boundaries.critical_values[k]) {
                out.rejected = true;
                out.rejection_look = static_cast<int>(k) + 1;
                out.enrolled_at_stop = m;
                n1_at_stop = st.n1;
                failures_at_stop = m - static_cast<long>(st.sum1 + st.sum2 + 0.5);
                better = policy_arm(st);
                if (scenario.rho_report == RhoReport::AtStop) break;
            }
            ++k;
        }
    }

    if (!out.rejected) {
        out.enrolled_at_stop = st.enrolled();
        n1_at_stop = st.n1;
        failures_at_stop = st.enrolled() - static_cast<long>(st.sum1 + st.sum2 + 0.5);
    }
    out.rho1_at_stop =
        static_cast<double>(n1_at_stop) / static_cast<double>(out.enrolled_at_stop);
    out.rho1_reported = scenario.rho_report == RhoReport::FullHorizon
                            ? static_cast<double>(st.n1) / static_cast<double>(st.enrolled())
                            : out.rho1_at_stop;

    if (scenario.model.kind == ModelKind::Binary) {
        long failures = failures_at_stop;
        if (out.rejected && out.enrolled_at_stop < n && scenario.remaining_patient_policy) {
            const double p =
                (better == 1) ? scenario.model.arm1.p : scenario.model.arm2.p;
            for (long i = out.enrolled_at_stop; i < n; ++i)
                if (!rng.bernoulli(p)) ++failures;
        }
        out.total_failures = failures;
    }
    return out;
}

AggregateReport monte_carlo_serial(const Scenario& scenario, const BoundarySet& boundaries,
                                   long replications, std::uint64_t master_seed) {
    if (replications < 1) throw std::invalid_argument("monte_carlo: replications < 1");
    Accumulator acc(scenario.schedule.size());
    for (long i = 0; i < replications; ++i)
        acc.add(run_trial(scenario, boundaries, derive_seed(master_seed,
                                                            static_cast<std::uint64_t>(i))));
    return reduce(scenario, acc, replications, master_seed);
}

AggregateReport monte_carlo(const Scenario& scenario, const BoundarySet& boundaries,
                            long replications, std::uint64_t master_seed,
                            const RunOptions& opts) {
    if (opts.threads == 1) return monte_carlo_serial(scenario, boundaries, replications,
                                                     master_seed);
    if (replications < 1) throw std::invalid_argument("monte_carlo: replications < 1");

#ifdef _OPENMP
    // Per-replication results land in a preallocated slot; the reduction runs
    // in index order afterwards, so the report is identical to the serial one.
    std::vector<TrialResult> results(static_cast<std::size_t>(replications));
    const int nthreads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
    for (long i = 0; i < replications; ++i) {
        results[static_cast<std::size_t>(i)] =
            run_trial(scenario, boundaries, derive_seed(master_seed,
                                                        static_cast<std::uint64_t>(i)));
    }
    Accumulator acc(scenario.schedule.size());
    for (const auto& r : results) acc.add(r);
    return reduce(scenario, acc, replications, master_seed);
#else
    return monte_carlo_serial(scenario, boundaries, replications, master_seed);
#endif
}

DiagnosticsReport canonical_diagnostics(const Scenario& scenario, long replications,
                                        std::uint64_t master_seed, const RunOptions& opts) {
    const std::size_t K = scenario.schedule.size();
    if (K < 2) throw std::invalid_argument("diagnostics need >= 2 looks");
    if (replications < 2) throw std::invalid_argument("diagnostics need >= 2 replications");

    // Record every look: infinite boundaries, no early stopping.
    BoundarySet open;
    open.critical_values.assign(K, std::numeric_limits<double>::infinity());
    open.total_alpha = scenario.spending.total_alpha;

    std::vector<double> z(static_cast<std::size_t>(replications) * K);
    const auto fill = [&](long i) {
        const TrialResult r = run_trial(scenario, open, derive_seed(master_seed,
                                                                    static_cast<std::uint64_t>(i)));
        for (std::size_t k = 0; k < K; ++k)
            z[static_cast<std::size_t>(i) * K + k] = r.looks[k].z;
    };
#ifdef _OPENMP
    const int nthreads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
    for (long i = 0; i < replications; ++i) fill(i);
#else
    (void)opts;
    for (long i = 0; i < replications; ++i) fill(i);
#endif

    DiagnosticsReport rep;
    rep.replications = replications;
    rep.master_seed = master_seed;
    rep.info_times = scenario.schedule.info_times();

    const double rho1 = scenario.design.kind == DesignKind::DBCD
                            ? target_rho(scenario.allocation, scenario.model)
                            : 0.5;
    rep.mu = drift_mu(scenario.model, rho1);

    const double R = static_cast<double>(replications);
    std::vector<double> mean(K, 0.0), var(K, 0.0);
    for (long i = 0; i < replications; ++i)
        for (std::size_t k = 0; k < K; ++k) mean[k] += z[static_cast<std::size_t>(i) * K + k];
    for (std::size_t k = 0; k < K; ++k) mean[k] /= R;

    std::vector<std::vector<double>> cov(K, std::vector<double>(K, 0.0));
    for (long i = 0; i < replications; ++i) {
        for (std::size_t a = 0; a < K; ++a) {
            const double da = z[static_cast<std::size_t>(i) * K + a] - mean[a];
            for (std::size_t b = a; b < K; ++b) {
                const double db = z[static_cast<std::size_t>(i) * K + b] - mean[b];
                cov[a][b] += da * db;
            }
        }
    }
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = a; b < K; ++b) cov[a][b] /= (R - 1.0);

    rep.empirical_mean = mean;
    rep.empirical_corr.assign(K, std::vector<double>(K, 1.0));
    rep.theoretical_corr.assign(K, std::vector<double>(K, 1.0));
    rep.theoretical_mean.resize(K);

    const auto& sizes = scenario.schedule.look_sizes;
    for (std::size_t k = 0; k < K; ++k) {
        rep.theoretical_mean[k] = rep.mu * std::sqrt(static_cast<double>(sizes[k]));
        rep.max_mean_dev = std::max(rep.max_mean_dev,
                                    std::fabs(mean[k] - rep.theoretical_mean[k]));
    }
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = a + 1; b < K; ++b) {
            const double denom = std::sqrt(cov[a][a] * cov[b][b]);
            const double emp = denom > 0.0 ? cov[a][b] / denom : 0.0;
            const double theo = std::sqrt(static_cast<double>(sizes[a]) /
                                          static_cast<double>(sizes[b]));
            rep.empirical_corr[a][b] = rep.empirical_corr[b][a] = emp;
            rep.theoretical_corr[a][b] = rep.theoretical_corr[b][a] = theo;
            rep.max_corr_dev = std::max(rep.max_corr_dev, std::fabs(emp - theo));
        }
    }
    return rep;
}

} // namespace seqrar
