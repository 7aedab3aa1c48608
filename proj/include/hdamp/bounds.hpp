#pragma once

// Closed-form high-energy bounds and the log-log fits used to test models
// against them.  Every "ln s" below means ln(s / s_hat) via BoundContext::log_s.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "hdamp/amplitude.hpp"
#include "hdamp/errors.hpp"
#include "hdamp/specfun.hpp"

namespace hdamp {

inline constexpr double kPionMass = 0.13957;

// s0 for pi-pi scattering: 1/s0 = 17 pi sqrt(pi/2) / m_pi^2.
inline double pipi_scale_s0(double m_pi = kPionMass) {
    return m_pi * m_pi / (17.0 * std::numbers::pi * std::sqrt(std::numbers::pi / 2.0));
}

struct BoundContext {
    double N = 2.0;
    double T0 = 1.0;
    double s_hat = 1.0;
    double C0 = 1.0;
    double C4 = 1.0;
    double C3_over_C2 = 4.0;
    double t0_4d = 4.0 * kPionMass * kPionMass;
    double eps = 0.0;
    double delta1_frac = 1e-3;
    std::optional<double> C2_override;
    std::optional<double> C3_override;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw config_error(std::string("ctx.") + name, "must be a positive finite number");
            }
        };
        positive(N, "N");
        positive(T0, "T0");
        positive(s_hat, "s_hat");
        positive(C0, "C0");
        positive(C4, "C4");
        positive(C3_over_C2, "C3_over_C2");
        positive(t0_4d, "t0_4d");
        if (!(eps >= 0.0) || !(eps < t0_4d)) {
            throw config_error("ctx.eps", "must satisfy 0 <= eps < t0_4d");
        }
        if (!(delta1_frac > 0.0 && delta1_frac < 1.0)) {
            throw config_error("ctx.delta1_frac", "must lie in (0, 1)");
        }
    }

    // The single place where the energy scale enters a logarithm.
    double log_s(double s) const { return std::log(s / s_hat); }
    double ratio(double s) const { return s / s_hat; }

    // C2 = T0 [e (N - 1)]^-2, the zero-free radius constant.
    double C2() const {
        if (C2_override) {
            return *C2_override;
        }
        if (!(N > 1.0)) {
            throw domain_error("C2 = T0 [e(N-1)]^-2 is undefined for N <= 1");
        }
        const double e_n = std::numbers::e * (N - 1.0);
        return T0 / (e_n * e_n);
    }

    double C3() const { return C3_override ? *C3_override : C3_over_C2 * C2(); }

    // T1 = T0 - delta1.
    double T1() const { return T0 * (1.0 - delta1_frac); }
};

// C1 = 2 lambda 2^(-2(lambda+1)) Gamma(lambda + 1).
inline double constant_C1(double lambda) {
    return 2.0 * lambda * std::exp(-2.0 * (lambda + 1.0) * std::numbers::ln2 + boost::math::lgamma(lambda + 1.0));
}

// A2 = 2 lambda A1 2^(-2 lambda - 1) Gamma(lambda + 1)^-2.
inline double constant_A2(double lambda) {
    using boost::math::lgamma;
    return 2.0 * lambda *
           std::exp(log_normalization_A1(lambda) - (2.0 * lambda + 1.0) * std::numbers::ln2 -
                    2.0 * lgamma(lambda + 1.0));
}

namespace detail {

inline void require_above_scale(double s, const BoundContext& ctx) {
    if (!(s > ctx.s_hat)) {
        throw domain_error("bound requires s > s_hat");
    }
}

}  // namespace detail

// sigma_t < 4 pi / (t0 - eps) [ln(s / s0)]^2 with s0 = s_hat.
inline double froissart_martin_4d(double s, const BoundContext& ctx) {
    if (!(ctx.t0_4d > ctx.eps)) {
        throw domain_error("froissart_martin_4d requires t0 > eps");
    }
    if (!(s >= ctx.s_hat)) {
        throw domain_error("froissart_martin_4d requires s >= s0");
    }
    const double log_s = ctx.log_s(s);
    return 4.0 * std::numbers::pi / (ctx.t0_4d - ctx.eps) * log_s * log_s;
}

// sigma_t <= C0 (ln s)^(D - 2).
inline double sigma_bound_D(double s, const DimensionSpec& dim, const BoundContext& ctx) {
    detail::require_above_scale(s, ctx);
    return ctx.C0 * std::pow(ctx.log_s(s), dim.D() - 2);
}

// ln of the modulus bound
//   A2 |t|^(-(lambda+1)/2) T0^(-lambda/2) s^(1 + (N-1) sqrt(|t|/T0)) (ln s)^lambda,
// evaluated without the open-interval check, so it also gives the limit |t| -> T0.
inline double log_modulus_bound_expression(double s, double t_abs, const DimensionSpec& dim,
                                           const BoundContext& ctx) {
    const double lambda = dim.lambda();
    const double log_s = ctx.log_s(s);
    return std::log(constant_A2(lambda)) - 0.5 * (lambda + 1.0) * std::log(t_abs) -
           0.5 * lambda * std::log(ctx.T0) + (1.0 + (ctx.N - 1.0) * std::sqrt(t_abs / ctx.T0)) * log_s +
           lambda * std::log(log_s);
}

inline double modulus_bound_expression(double s, double t_abs, const DimensionSpec& dim, const BoundContext& ctx) {
    detail::require_above_scale(s, ctx);
    if (!(t_abs > 0.0 && t_abs <= ctx.T0)) {
        throw domain_error("modulus bound expression requires 0 < |t| <= T0");
    }
    return std::exp(log_modulus_bound_expression(s, t_abs, dim, ctx));
}

inline double modulus_bound(double s, double t_abs, const DimensionSpec& dim, const BoundContext& ctx) {
    if (!(t_abs > 0.0 && t_abs < ctx.T0)) {
        throw domain_error("modulus_bound requires 0 < |t| < T0");
    }
    return modulus_bound_expression(s, t_abs, dim, ctx);
}

// Exponent of s in the modulus bound; independent of lambda.
inline double modulus_bound_s_power(double t_abs, const BoundContext& ctx) {
    return 1.0 + (ctx.N - 1.0) * std::sqrt(t_abs / ctx.T0);
}

// (N - 1) sqrt(r / delta) / (ln(1/delta) sqrt(T0)) ln s, without the r/T0 < delta check.
inline double jensen_delta_form(double r, double delta, double s, const BoundContext& ctx) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw domain_error("jensen delta must lie in (0, 1)");
    }
    return (ctx.N - 1.0) * std::sqrt(r / delta) / (std::log(1.0 / delta) * std::sqrt(ctx.T0)) * ctx.log_s(s);
}

enum class CountBoundForm {
    // e sqrt(r) / (2 sqrt(T0)) (N - 1) ln s: the delta = e^-2 minimum of the delta form.
    with_n_minus_one,
    // e sqrt(r) / (2 sqrt(T0)) ln s.
    without_n_minus_one,
};

// Upper bound on the number of zeros in |t| < r.  The optimized form accepts
// 0 <= r <= T0; the delta form requires r/T0 < delta < 1.
inline double jensen_count_bound(double r, double s, const BoundContext& ctx, bool optimized,
                                 std::optional<double> delta = std::nullopt,
                                 CountBoundForm form = CountBoundForm::with_n_minus_one) {
    detail::require_above_scale(s, ctx);
    if (optimized) {
        if (!(r >= 0.0 && r <= ctx.T0)) {
            throw domain_error("jensen_count_bound requires 0 <= r <= T0");
        }
        const double n_factor = form == CountBoundForm::with_n_minus_one ? ctx.N - 1.0 : 1.0;
        return std::numbers::e * std::sqrt(r) / (2.0 * std::sqrt(ctx.T0)) * ctx.log_s(s) * n_factor;
    }
    if (!delta) {
        throw domain_error("jensen_count_bound: the unoptimized form needs delta");
    }
    if (!(r >= 0.0 && r < ctx.T0)) {
        throw domain_error("jensen_count_bound requires 0 <= r < T0");
    }
    if (!(*delta > r / ctx.T0 && *delta < 1.0)) {
        throw domain_error("jensen_count_bound requires r/T0 < delta < 1");
    }
    return jensen_delta_form(r, *delta, s, ctx);
}

struct ZeroFreeRadius {
    double r0_max;
    double annulus_inner;
    double annulus_outer;
    // The disk reaches past T0, outside the region where the bound is derived.
    bool out_of_model;
};

inline ZeroFreeRadius zero_free_radius(double s, const BoundContext& ctx) {
    detail::require_above_scale(s, ctx);
    if (!(ctx.N > 1.0) && !ctx.C2_override) {
        throw domain_error("zero_free_radius requires N > 1");
    }
    const double log_s = ctx.log_s(s);
    const double log_s2 = log_s * log_s;
    const double r0 = ctx.C2() / log_s2;
    return {r0, r0, ctx.C3() / log_s2, !(r0 < ctx.T0)};
}

// |v| <= pi sqrt(u) / (2 C4 ln s): half-width of the positivity domain at Re t = u.
inline double domain_halfwidth(double u, double s, const BoundContext& ctx) {
    if (!(u > 0.0)) {
        throw domain_error("domain_halfwidth requires u > 0");
    }
    detail::require_above_scale(s, ctx);
    return std::numbers::pi * std::sqrt(u) / (2.0 * ctx.C4 * ctx.log_s(s));
}

// Radius of the disk around R0 in which the absorptive part is bounded by the
// Harnack factors with parameter r.
inline double harnack_disk_radius(double R0, double r, double s, const BoundContext& ctx) {
    return r * domain_halfwidth(R0, s, ctx);
}

struct Interval {
    double lo;
    double hi;

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool strictly_contains(double v) const { return lo < v && v < hi; }
};

inline Interval harnack_interval(double value_at_center, double r) {
    if (!(value_at_center > 0.0)) {
        throw domain_error("harnack_interval requires a positive center value");
    }
    if (!(r >= 0.0 && r < 1.0)) {
        throw domain_error("harnack_interval requires 0 <= r < 1");
    }
    return {(1.0 - r) / (1.0 + r) * value_at_center, (1.0 + r) / (1.0 - r) * value_at_center};
}

struct LineFit {
    double slope;
    double intercept;
    double rms_residual;
};

inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw domain_error("fit_line needs two or more (x, y) pairs");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw domain_error("fit_line needs distinct abscissae");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    return {slope, intercept, std::sqrt(ss / n)};
}

struct ScalingPoint {
    double s;
    double value;
};

struct ScalingFit {
    double exponent;
    double residual;
};

// Least-squares slope of ln(value) against ln ln(s / s_hat).
inline ScalingFit scaling_exponent_fit(std::span<const ScalingPoint> points, double s_hat = 1.0) {
    if (points.size() < 3) {
        throw domain_error("scaling_exponent_fit needs at least 3 points");
    }
    std::vector<double> xs, ys;
    for (const ScalingPoint& p : points) {
        if (!(p.value > 0.0)) {
            throw domain_error("scaling_exponent_fit requires positive values");
        }
        if (!(p.s > s_hat)) {
            throw domain_error("scaling_exponent_fit requires s > s_hat");
        }
        xs.push_back(std::log(std::log(p.s / s_hat)));
        ys.push_back(std::log(p.value));
    }
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw domain_error("scaling_exponent_fit requires distinct s values");
    }
    const LineFit fit = fit_line(xs, ys);
    return {fit.slope, fit.rms_residual};
}

}  // namespace hdamp
