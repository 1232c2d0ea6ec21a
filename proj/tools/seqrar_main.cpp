// Command-line front end: boundary computation, scenario simulation, one-shot
// interim monitoring, and joint-law diagnostics.

#include "seqrar/boundaries.hpp"
#include "seqrar/engine.hpp"
#include "seqrar/gaussian.hpp"
#include "seqrar/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace seqrar;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SpendingKind parse_spending_kind(const std::string& s) {
    if (s == "obf") return SpendingKind::OBFLike;
    if (s == "linear") return SpendingKind::Linear;
    if (s == "pocock") return SpendingKind::PocockLike;
    throw ValidationFailure("unknown spending function '" + s + "' (obf|linear|pocock)");
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t cli_seed,
                           std::uint64_t fallback) {
    if (seed_opt->count() > 0) return cli_seed;
    if (const char* env = std::getenv("SEQRAR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationFailure("SEQRAR_SEED is not an integer");
        }
    }
    return fallback;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationFailure("cannot write " + path);
    out << body;
}

// ---------------------------------------------------------------------------
// boundaries
// ---------------------------------------------------------------------------

int cmd_boundaries(const std::vector<double>& looks, const std::string& spending,
                   double alpha, int grid) {
    if (looks.empty()) throw ValidationFailure("no looks given");
    for (std::size_t i = 1; i < looks.size(); ++i)
        if (looks[i] <= looks[i - 1]) throw ValidationFailure("looks not increasing");
    if (looks.front() <= 0.0 || looks.back() > 1.0)
        throw ValidationFailure("looks must lie in (0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationFailure("alpha out of (0,1)");

    SpendingFunction fn;
    fn.kind = parse_spending_kind(spending);
    fn.total_alpha = alpha;

    std::vector<double> cum(looks.size());
    for (std::size_t k = 0; k < looks.size(); ++k) cum[k] = spend(fn, looks[k]);
    const BoundarySet bs = solve_from_spends(looks, cum, alpha, grid);

    std::printf("look        t  cumulative_alpha  boundary\n");
    for (std::size_t k = 0; k < looks.size(); ++k) {
        std::printf("%4zu  %7.4f  %16.6f  %8.4f\n", k + 1, looks[k], cum[k],
                    bs.critical_values[k]);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

BoundarySet boundaries_for(const Scenario& s, int grid) {
    return solve_boundaries(s.schedule, s.spending, grid);
}

int cmd_simulate(const std::string& scenario_path, long replications_override,
                 const CLI::Option* seed_opt, std::uint64_t seed_override, int parallel,
                 std::string out_path, const std::string& dump_path, int grid) {
    ScenarioBatch batch = load_scenario_file(scenario_path);

    std::vector<RowResult> rows;
    rows.reserve(batch.rows.size());
    RunOptions opts;
    opts.threads = parallel;

    for (auto& s : batch.rows) {
        if (replications_override > 0) s.replications = replications_override;
        s.master_seed = resolve_seed(seed_opt, seed_override, s.master_seed);
        const auto violations = validate_scenario(s);
        if (!violations.empty()) {
            std::string msg = "scenario '" + s.id + "' invalid:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw ValidationFailure(msg);
        }
        const BoundarySet bs = boundaries_for(s, grid);
        RowResult rr;
        rr.report = monte_carlo(s, bs, s.replications, s.master_seed, opts);
        rr.scenario = std::move(s);
        rows.push_back(std::move(rr));
    }

    const std::string csv = report_csv(rows);
    if (out_path.empty()) out_path = batch.id + "_report.csv";
    write_file(out_path, csv);
    std::fputs(csv.c_str(), stdout);
    std::fprintf(stdout, "wrote %s\n", out_path.c_str());

    if (!dump_path.empty()) {
        json dump = json::array();
        for (const auto& r : rows) dump.push_back(report_to_json(r));
        write_file(dump_path, dump.dump(2) + "\n");
        std::fprintf(stdout, "wrote %s\n", dump_path.c_str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// monitor
// ---------------------------------------------------------------------------

struct InterimArm {
    long count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
};

InterimArm parse_interim_arm(const json& j, ModelKind kind, const std::string& ctx) {
    InterimArm a;
    if (!j.is_object()) throw ParseError(ctx + ": expected an object");
    a.count = j.at("count").get<long>();
    if (a.count < 1) throw ParseError(ctx + ".count must be >= 1");
    if (kind == ModelKind::Binary) {
        const long succ = j.at("successes").get<long>();
        if (succ < 0 || succ > a.count) throw ParseError(ctx + ".successes out of range");
        a.sum = static_cast<double>(succ);
        a.sumsq = static_cast<double>(succ);
    } else {
        if (a.count < 2) throw ParseError(ctx + ".count must be >= 2 for normal responses");
        const double mean = j.at("mean").get<double>();
        const double sd = j.at("sd").get<double>();
        if (!(sd >= 0.0)) throw ParseError(ctx + ".sd must be >= 0");
        a.sum = static_cast<double>(a.count) * mean;
        a.sumsq = static_cast<double>(a.count - 1) * sd * sd + a.sum * mean;
    }
    return a;
}

int cmd_monitor(const std::string& interim_path, int grid) {
    std::ifstream in(interim_path);
    if (!in) throw ValidationFailure("cannot open interim file: " + interim_path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationFailure(interim_path + ": " + std::string(e.what()));
    }

    const int planned_n = j.at("planned_n").get<int>();
    if (planned_n < 1) throw ValidationFailure("planned_n must be >= 1");
    const std::string mk = j.at("model_kind").get<std::string>();
    const ModelKind kind = mk == "normal" ? ModelKind::Normal
                           : mk == "binary"
                               ? ModelKind::Binary
                               : throw ValidationFailure("model_kind must be normal|binary");

    SpendingFunction fn;
    const json& jf = j.at("spending");
    const std::string fk = jf.at("kind").get<std::string>();
    if (fk == "fixed") {
        fn.kind = SpendingKind::Fixed;
        fn.fixed_values = jf.at("values").get<std::vector<double>>();
    } else {
        fn.kind = parse_spending_kind(fk);
    }
    fn.total_alpha = jf.at("total_alpha").get<double>();
    if (!(fn.total_alpha > 0.0 && fn.total_alpha < 1.0))
        throw ValidationFailure("spending.total_alpha out of (0,1)");

    std::vector<int> past;
    if (j.contains("past_looks")) past = j.at("past_looks").get<std::vector<int>>();
    for (std::size_t i = 0; i < past.size(); ++i) {
        if (past[i] <= 0 || (i > 0 && past[i] <= past[i - 1]))
            throw ValidationFailure("past_looks must be positive and strictly increasing");
    }

    const json& jc = j.at("current_look");
    const int n_cur = jc.at("n").get<int>();
    if (!past.empty() && n_cur <= past.back())
        throw ValidationFailure("current look " + std::to_string(n_cur) +
                                " <= last recorded look " + std::to_string(past.back()));
    if (n_cur > planned_n) throw ValidationFailure("current look exceeds planned_n");

    TrialState st;
    if (jc.contains("patients")) {
        for (const auto& p : jc.at("patients")) {
            const int arm = p.at("arm").get<int>();
            if (arm != 1 && arm != 2) throw ValidationFailure("patients.arm must be 1 or 2");
            st.record(arm, p.at("y").get<double>());
        }
        if (st.enrolled() != n_cur)
            throw ValidationFailure("patients length != current_look.n");
    } else {
        const InterimArm a1 = parse_interim_arm(jc.at("arm1"), kind, "arm1");
        const InterimArm a2 = parse_interim_arm(jc.at("arm2"), kind, "arm2");
        if (a1.count + a2.count != n_cur)
            throw ValidationFailure("arm counts do not sum to current_look.n");
        st.n1 = a1.count;
        st.sum1 = a1.sum;
        st.sumsq1 = a1.sumsq;
        st.n2 = a2.count;
        st.sum2 = a2.sum;
        st.sumsq2 = a2.sumsq;
    }

    std::vector<double> ts;
    for (int nk : past) ts.push_back(static_cast<double>(nk) / planned_n);
    ts.push_back(static_cast<double>(n_cur) / planned_n);
    const std::size_t k = ts.size();

    double boundary, cum_alpha;
    if (fn.kind == SpendingKind::Fixed) {
        if (fn.fixed_values.size() < k)
            throw ValidationFailure("spending.values shorter than the number of looks");
        boundary = fn.fixed_values[k - 1];
        cum_alpha = std::numeric_limits<double>::quiet_NaN();
    } else {
        std::vector<double> cum(k);
        for (std::size_t i = 0; i < k; ++i) cum[i] = spend(fn, ts[i]);
        const BoundarySet bs = solve_from_spends(ts, cum, fn.total_alpha, grid);
        boundary = bs.critical_values[k - 1];
        cum_alpha = cum[k - 1];
    }

    const LookStatistic ls =
        z_statistic(st, kind, static_cast<int>(k), ts[k - 1], TestEstimator::Raw);

    std::printf("look %zu at t=%.4f (n=%d/%d)\n", k, ts[k - 1], n_cur, planned_n);
    if (!std::isnan(cum_alpha))
        std::printf("cumulative alpha spent: %.6f\n", cum_alpha);
    std::printf("boundary: %.4f\n", boundary);
    std::printf("z: %.4f\n", ls.z);
    if (ls.degenerate_variance)
        std::printf("warning: variance floored at this look\n");
    std::printf("decision: %s\n", std::fabs(ls.z) >= boundary ? "STOP-REJECT" : "CONTINUE");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

int cmd_diagnose(const std::string& scenario_path, long replications,
                 const CLI::Option* seed_opt, std::uint64_t seed_override, int parallel,
                 std::size_t row_index, const std::string& out_path) {
    ScenarioBatch batch = load_scenario_file(scenario_path);
    if (row_index < 1 || row_index > batch.rows.size())
        throw ValidationFailure("row index out of range (file has " +
                                std::to_string(batch.rows.size()) + " rows)");
    Scenario s = batch.rows[row_index - 1];
    if (replications > 0) s.replications = replications;
    s.master_seed = resolve_seed(seed_opt, seed_override, s.master_seed);
    const auto violations = validate_scenario(s);
    if (!violations.empty())
        throw ValidationFailure("scenario invalid: " + violations.front());

    RunOptions opts;
    opts.threads = parallel;
    const DiagnosticsReport rep =
        canonical_diagnostics(s, s.replications, s.master_seed, opts);

    std::string body;
    body += "scenario " + s.id + ", row " + std::to_string(row_index) + ", " +
            std::to_string(rep.replications) + " replications, seed " +
            std::to_string(rep.master_seed) + "\n";
    body += "mu = " + fmt("%.6f", rep.mu) + "\n\n";
    body += "look        t     mean_Z  theoretical  deviation\n";
    for (std::size_t k = 0; k < rep.info_times.size(); ++k) {
        body += fmt("%4.0f", static_cast<double>(k + 1)) + "  " +
                fmt("%7.4f", rep.info_times[k]) + "  " + fmt("%9.4f", rep.empirical_mean[k]) +
                "  " + fmt("%11.4f", rep.theoretical_mean[k]) + "  " +
                fmt("%9.4f", rep.empirical_mean[k] - rep.theoretical_mean[k]) + "\n";
    }
    body += "\npair      corr  theoretical  deviation\n";
    const std::size_t K = rep.info_times.size();
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = a + 1; b < K; ++b) {
            body += "(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")  " +
                    fmt("%8.4f", rep.empirical_corr[a][b]) + "  " +
                    fmt("%11.4f", rep.theoretical_corr[a][b]) + "  " +
                    fmt("%9.4f", rep.empirical_corr[a][b] - rep.theoretical_corr[a][b]) + "\n";
        }
    }
    body += "\nmax |mean deviation| = " + fmt("%.4f", rep.max_mean_dev) + "\n";
    body += "max |corr deviation| = " + fmt("%.4f", rep.max_corr_dev) + "\n";

    std::fputs(body.c_str(), stdout);
    if (!out_path.empty()) {
        write_file(out_path, body);
        std::fprintf(stdout, "wrote %s\n", out_path.c_str());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-sequential monitoring of response-adaptive randomized trials"};
    app.require_subcommand(1);

    // boundaries
    auto* sub_b = app.add_subcommand("boundaries", "Solve spending-function boundaries");
    std::vector<double> looks;
    std::string spending = "linear";
    double alpha = 0.05;
    int grid = 512;
    sub_b->add_option("--looks", looks, "Information times, e.g. 0.2,0.5,1")
        ->required()
        ->delimiter(',');
    sub_b->add_option("--spending", spending, "obf|linear|pocock");
    sub_b->add_option("--alpha", alpha, "Total two-sided type I error");
    sub_b->add_option("--grid", grid, "Grid points per look");

    // simulate
    auto* sub_s = app.add_subcommand("simulate", "Run Monte Carlo for a scenario file");
    std::string scenario_path, out_path, dump_path;
    long replications = 0;
    std::uint64_t seed = 0;
    int parallel = 0;
    int grid_s = 512;
    sub_s->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sub_s->add_option("--replications", replications, "Override replications");
    auto* seed_opt_s = sub_s->add_option("--seed", seed, "Override master seed");
    sub_s->add_option("--parallel", parallel, "Worker threads (0 = all cores)");
    sub_s->add_option("--out", out_path, "Report CSV path (default <scenario_id>_report.csv)");
    sub_s->add_option("--dump", dump_path, "Full JSON dump path");
    sub_s->add_option("--grid", grid_s, "Grid points per look");

    // monitor
    auto* sub_m = app.add_subcommand("monitor", "One-shot interim decision");
    std::string interim_path;
    int grid_m = 512;
    sub_m->add_option("--interim", interim_path, "Interim record JSON file")->required();
    sub_m->add_option("--grid", grid_m, "Grid points per look");

    // diagnose
    auto* sub_d = app.add_subcommand("diagnose", "Empirical joint-law diagnostics");
    std::string scenario_path_d, out_path_d;
    long replications_d = 0;
    std::uint64_t seed_d = 0;
    int parallel_d = 0;
    std::size_t row = 1;
    sub_d->add_option("--scenario", scenario_path_d, "Scenario JSON file")->required();
    sub_d->add_option("--replications", replications_d, "Override replications");
    auto* seed_opt_d = sub_d->add_option("--seed", seed_d, "Override master seed");
    sub_d->add_option("--parallel", parallel_d, "Worker threads (0 = all cores)");
    sub_d->add_option("--row", row, "Row of a batch file to diagnose (1-based)");
    sub_d->add_option("--out", out_path_d, "Write the table to this file too");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_b->parsed()) return cmd_boundaries(looks, spending, alpha, grid);
        if (sub_s->parsed())
            return cmd_simulate(scenario_path, replications, seed_opt_s, seed, parallel,
                                out_path, dump_path, grid_s);
        if (sub_m->parsed()) return cmd_monitor(interim_path, grid_m);
        if (sub_d->parsed())
            return cmd_diagnose(scenario_path_d, replications_d, seed_opt_d, seed_d,
                                parallel_d, row, out_path_d);
    } catch (const ValidationFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
