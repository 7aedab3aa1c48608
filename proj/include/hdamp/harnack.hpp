#pragma once

// Positivity of Re A(s, t) in the domain |Im t| <= pi sqrt(Re t) / (2 C4 ln s)
// and the Harnack two-sided bound inside disks around a real point R0.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "hdamp/amplitude.hpp"
#include "hdamp/bounds.hpp"
#include "hdamp/random.hpp"

namespace hdamp {

inline double physical_s(const PartialWaveSet& pw, const BoundContext& ctx) { return pw.s() * ctx.s_hat; }

struct HarnackCheck {
    double R0;
    double r;
    double disk_radius;
    double center_value;
    Interval interval;
    unsigned samples;
    unsigned violations;
    double min_ratio;  // min Re A(t) / A(R0) over the samples
    double max_ratio;
};

// Samples t uniformly in |t - R0| < r * pi sqrt(R0) / (2 C4 ln s) and checks
// (1-r)/(1+r) A(R0) < Re A(t) < (1+r)/(1-r) A(R0).
inline HarnackCheck harnack_check(const PartialWaveSet& pw, double R0, double r, const BoundContext& ctx,
                                  unsigned samples, SeededRng& rng) {
    if (!(R0 > 0.0 && R0 < ctx.T1())) {
        throw domain_error("harnack_check requires 0 < R0 < T0 - delta1");
    }
    const double s = physical_s(pw, ctx);
    const double center = absorptive_eval(pw, R0).real();
    const Interval interval = harnack_interval(center, r);
    HarnackCheck check{R0, r, harnack_disk_radius(R0, r, s, ctx), center, interval, samples, 0,
                       std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (unsigned k = 0; k < samples; ++k) {
        const double rho = check.disk_radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const complex t = R0 + std::polar(rho, phi);
        const double value = absorptive_eval(pw, t).real();
        check.min_ratio = std::min(check.min_ratio, value / center);
        check.max_ratio = std::max(check.max_ratio, value / center);
        if (!interval.strictly_contains(value)) {
            ++check.violations;
        }
    }
    return check;
}

struct PositivityScan {
    bool positive;
    double min_ratio;  // min over the grid of Re A(u + iv) / A(u)
    double worst_u;
    double worst_v;
};

// Grid u_k = k T1 / u_points (k = 1..u_points), v_j = j h(u) / v_points (j = 0..v_points)
// with h the domain half-width; A has real coefficients, so v >= 0 suffices.
inline PositivityScan domain_positivity(const PartialWaveSet& pw, const BoundContext& ctx, unsigned u_points,
                                        unsigned v_points) {
    const double s = physical_s(pw, ctx);
    PositivityScan scan{true, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (unsigned k = 1; k <= u_points; ++k) {
        const double u = ctx.T1() * k / u_points;
        const double on_axis = absorptive_eval(pw, u).real();
        const double half_width = domain_halfwidth(u, s, ctx);
        for (unsigned j = 0; j <= v_points; ++j) {
            const double v = half_width * j / v_points;
            const double ratio = absorptive_eval(pw, complex(u, v)).real() / on_axis;
            if (ratio < scan.min_ratio) {
                scan.min_ratio = ratio;
                scan.worst_u = u;
                scan.worst_v = v;
            }
        }
    }
    scan.positive = scan.min_ratio > 0.0;
    return scan;
}

// Smallest C4 on the ladder whose domain passes the positivity scan.
inline std::optional<double> calibrate_C4(const PartialWaveSet& pw, BoundContext ctx, std::span<const double> ladder,
                                          unsigned u_points = 8, unsigned v_points = 8) {
    for (const double c4 : ladder) {
        ctx.C4 = c4;
        if (domain_positivity(pw, ctx, u_points, v_points).positive) {
            return c4;
        }
    }
    return std::nullopt;
}

inline std::vector<double> default_C4_ladder() {
    std::vector<double> ladder;
    for (int k = 1; k <= 200; ++k) {
        ladder.push_back(0.05 * k);
    }
    return ladder;
}

// Smallest v in (0, v_max] with Re A(u + iv) = 0, located by a scan of `steps`
// intervals followed by bisection.
inline std::optional<double> first_sign_change_v(const PartialWaveSet& pw, double u, double v_max,
                                                 unsigned steps = 400) {
    auto re = [&](double v) { return absorptive_eval(pw, complex(u, v)).real(); };
    double lo = 0.0;
    double f_lo = re(lo);
    for (unsigned k = 1; k <= steps; ++k) {
        const double hi = v_max * k / steps;
        const double f_hi = re(hi);
        if ((f_lo > 0.0) != (f_hi > 0.0)) {
            double a = lo, b = hi;
            for (int iter = 0; iter < 80; ++iter) {
                const double mid = 0.5 * (a + b);
                if ((re(mid) > 0.0) == (f_lo > 0.0)) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        lo = hi;
        f_lo = f_hi;
    }
    return std::nullopt;
}

}  // namespace hdamp
