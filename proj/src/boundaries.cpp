#include "seqrar/boundaries.hpp"

#include "seqrar/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqrar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSpanSd = 7.5;   // half-width of the density grid, in sd of B_t
constexpr double kMaxZ = 15.0;    // bisection bracket on the Z scale
constexpr double kProbTol = 1e-6; // solver tolerance on the spend increment

void check_times(const std::vector<double>& ts) {
    if (ts.empty()) throw std::invalid_argument("boundaries: empty look schedule");
    double prev = 0.0;
    for (double t : ts) {
        if (!(t > prev)) throw std::invalid_argument("boundaries: looks not increasing");
        prev = t;
    }
    if (!(ts.back() <= 1.0 + 1e-12))
        throw std::invalid_argument("boundaries: information times must end at 1");
}

// Sub-density of the B-process over the continuation region of one look,
// sampled on a trapezoid grid.
struct SubDensity {
    std::vector<double> x; // grid nodes
    std::vector<double> w; // trapezoid weights
    std::vector<double> h; // density values

    double mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * h[i];
        return m;
    }
};

// First-look density is the plain normal; later looks convolve the previous
// sub-density with the increment kernel.
SubDensity propagate(const SubDensity* prev, double t, double dt, double c, double drift,
                     int grid_points) {
    SubDensity d;
    const double sd = std::sqrt(t);
    double lo = std::max(-c, drift * t - kSpanSd * sd);
    double hi = std::min(c, drift * t + kSpanSd * sd);
    if (!(hi > lo)) {
        // continuation region is beyond the drifted mass; keep a token grid
        lo = std::min(-c, c) - 1e-12;
        hi = lo + 2e-12;
    }
    const int n = grid_points;
    d.x.resize(static_cast<std::size_t>(n));
    d.w.resize(static_cast<std::size_t>(n));
    d.h.resize(static_cast<std::size_t>(n));
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        d.x[static_cast<std::size_t>(i)] = lo + step * i;
        d.w[static_cast<std::size_t>(i)] = (i == 0 || i == n - 1) ? 0.5 * step : step;
    }
    const double sdt = std::sqrt(dt);
    if (prev == nullptr) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            d.h[k] = normal_pdf((d.x[k] - drift * t) / sd) / sd;
        }
        return d;
    }
    for (int i = 0; i < n; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < prev->x.size(); ++j) {
            acc += prev->w[j] * prev->h[j] *
                   normal_pdf((d.x[k] - prev->x[j] - drift * dt) / sdt);
        }
        d.h[k] = acc / sdt;
    }
    return d;
}

// Probability of first crossing at this look for two-sided barrier +-c on the
// B scale, given the previous sub-density (null pointer = first look).
double exit_probability(const SubDensity* prev, double t, double dt, double c,
                        double drift) {
    if (c == kInf) return 0.0;
    const double sdt = std::sqrt(dt);
    if (prev == nullptr) {
        return normal_cdf((-c - drift * t) / std::sqrt(t)) +
               normal_cdf_c((c - drift * t) / std::sqrt(t));
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < prev->x.size(); ++j) {
        const double up = normal_cdf_c((c - prev->x[j] - drift * dt) / sdt);
        const double dn = normal_cdf((-c - prev->x[j] - drift * dt) / sdt);
        acc += prev->w[j] * prev->h[j] * (up + dn);
    }
    return acc;
}

} // namespace

double spend(const SpendingFunction& fn, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("spend: t outside [0,1]");
    if (t == 0.0) return 0.0;
    const double alpha = fn.total_alpha;
    switch (fn.kind) {
        case SpendingKind::Linear:
            return alpha * t;
        case SpendingKind::PocockLike:
            return alpha * std::log1p((std::exp(1.0) - 1.0) * t);
        case SpendingKind::OBFLike: {
            const double z = normal_quantile(1.0 - alpha / 2.0);
            return 2.0 * normal_cdf_c(z / std::sqrt(t));
        }
        case SpendingKind::Fixed:
            break;
    }
    throw std::invalid_argument("spend: fixed boundaries have no spending formula");
}

BoundarySet solve_from_spends(const std::vector<double>& info_times,
                              const std::vector<double>& cumulative_spend,
                              double total_alpha, int grid_points) {
    check_times(info_times);
    if (cumulative_spend.size() != info_times.size())
        throw std::invalid_argument("solve_from_spends: spend/time length mismatch");
    if (grid_points < 8) throw std::invalid_argument("solve_from_spends: grid too small");

    const std::size_t K = info_times.size();
    BoundarySet out;
    out.total_alpha = total_alpha;
    out.cumulative_spend = cumulative_spend;
    out.critical_values.resize(K);

    SubDensity dens;
    bool have_dens = false;
    double tprev = 0.0, spent = 0.0;

    for (std::size_t k = 0; k < K; ++k) {
        const double t = info_times[k];
        const double dt = t - tprev;
        const double pi = cumulative_spend[k] - spent;
        if (pi < -1e-12)
            throw std::invalid_argument("solve_from_spends: decreasing spending");

        double b;
        if (pi <= 0.0) {
            b = kInf;
        } else if (!have_dens) {
            b = normal_quantile(1.0 - pi / 2.0);
        } else {
            const SubDensity* prev = &dens;
            double lo = 0.0, hi = kMaxZ;
            const double p_lo = exit_probability(prev, t, dt, lo * std::sqrt(t), 0.0);
            if (p_lo < pi)
                throw std::runtime_error("solve_from_spends: spend increment exceeds remaining mass");
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double p = exit_probability(prev, t, dt, mid * std::sqrt(t), 0.0);
                if (p > pi)
                    lo = mid;
                else
                    hi = mid;
            }
            b = 0.5 * (lo + hi);
            const double resid = exit_probability(prev, t, dt, b * std::sqrt(t), 0.0) - pi;
            if (std::fabs(resid) > kProbTol)
                throw std::runtime_error("solve_from_spends: bisection residual above tolerance");
        }
        out.critical_values[k] = b;

        if (k + 1 < K) {
            dens = propagate(have_dens ? &dens : nullptr, t, dt, b * std::sqrt(t), 0.0,
                             grid_points);
            have_dens = true;
            tprev = t;
            spent = cumulative_spend[k];
        }
    }
    return out;
}

BoundarySet solve_boundaries(const LookSchedule& schedule, const SpendingFunction& fn,
                             int grid_points) {
    const auto ts = schedule.info_times();
    if (fn.kind == SpendingKind::Fixed) {
        if (fn.fixed_values.size() != ts.size())
            throw std::invalid_argument("solve_boundaries: fixed values length mismatch");
        check_times(ts);
        BoundarySet out;
        out.total_alpha = fn.total_alpha;
        out.critical_values = fn.fixed_values;
        return out;
    }
    std::vector<double> cum(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) cum[k] = spend(fn, ts[k]);
    return solve_from_spends(ts, cum, fn.total_alpha, grid_points);
}

CrossingResult crossing_probability(const std::vector<double>& info_times,
                                    const std::vector<double>& critical_values,
                                    double drift, int grid_points) {
    check_times(info_times);
    if (critical_values.size() != info_times.size())
        throw std::invalid_argument("crossing_probability: boundary/schedule length mismatch");

    const std::size_t K = info_times.size();
    CrossingResult res;
    res.per_look.resize(K);

    SubDensity dens;
    bool have_dens = false;
    double tprev = 0.0;

    for (std::size_t k = 0; k < K; ++k) {
        const double t = info_times[k];
        const double dt = t - tprev;
        const double b = critical_values[k];
        const double c = (b == kInf) ? kInf : b * std::sqrt(t);
        res.per_look[k] = exit_probability(have_dens ? &dens : nullptr, t, dt, c, drift);
        res.overall += res.per_look[k];
        if (k + 1 < K) {
            dens = propagate(have_dens ? &dens : nullptr, t, dt, c, drift, grid_points);
            have_dens = true;
            tprev = t;
        }
    }
    return res;
}

CrossingResult crossing_probability(const BoundarySet& boundaries,
                                    const LookSchedule& schedule, double drift,
                                    int grid_points) {
    return crossing_probability(schedule.info_times(), boundaries.critical_values, drift,
                                grid_points);
}

} // namespace seqrar
