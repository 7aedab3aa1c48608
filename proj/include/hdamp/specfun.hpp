#pragma once

// Gegenbauer (ultraspherical) polynomials C_l^lambda for real and complex
// arguments, including the exponentially growing region x > 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hdamp/errors.hpp"

namespace hdamp {

inline constexpr unsigned kDefaultMaxDegree = 1'000'000;
inline constexpr unsigned kSeriesMaxDegree = 200;
inline constexpr unsigned kOrthogonalityMaxDegree = 64;

// Spacetime dimension D >= 4 and the Gegenbauer index lambda = (D - 3) / 2.
class DimensionSpec {
public:
    explicit DimensionSpec(int D) : D_(D) {
        if (D < 4) {
            throw domain_error("dimension D must be >= 4, got " + std::to_string(D));
        }
    }

    int D() const noexcept { return D_; }
    double lambda() const noexcept { return 0.5 * (D_ - 3); }
    bool is_four_dimensional() const noexcept { return D_ == 4; }

    friend bool operator==(const DimensionSpec&, const DimensionSpec&) = default;

private:
    int D_;
};

// |value| = exp(log_magnitude), arg(value) = phase.  Real values carry phase 0 or pi.
struct ScaledValue {
    double log_magnitude = 0.0;
    double phase = 0.0;

    std::complex<double> to_complex() const { return std::polar(std::exp(log_magnitude), phase); }
    double to_real() const { return std::exp(log_magnitude) * std::cos(phase); }
};

namespace detail {

inline constexpr int kRescaleExponent = 512;
inline const double kRescaleThreshold = std::ldexp(1.0, kRescaleExponent);
inline const double kRescaleFactor = std::ldexp(1.0, -kRescaleExponent);
inline const double kRescaleLog = kRescaleExponent * std::numbers::ln2;

inline double magnitude_bound(double v) { return std::abs(v); }
inline long double magnitude_bound(long double v) { return std::abs(v); }
inline double magnitude_bound(const std::complex<double>& v) {
    return std::max(std::abs(v.real()), std::abs(v.imag()));
}

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(long double v) { return std::isfinite(v); }
inline bool is_finite(const std::complex<double>& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

inline void check_lambda(double lambda) {
    if (!std::isfinite(lambda)) {
        throw domain_error("lambda must be finite");
    }
}

}  // namespace detail

// Forward three-term recurrence
//   l C_l = 2 (l + lambda - 1) x C_{l-1} - (l + 2 lambda - 2) C_{l-2},
// carried as a mantissa times exp(log_scale).  Whenever the mantissa exceeds 2^512
// both stored terms are multiplied by 2^-512, which is exact in binary floating point,
// so value() * exp(log_scale()) reproduces the unscaled recurrence bit for bit.
template <class V>
class GegenbauerRecurrence {
    static_assert(std::is_same_v<V, double> || std::is_same_v<V, long double> ||
                  std::is_same_v<V, std::complex<double>>);

public:
    GegenbauerRecurrence(double lambda, V x) : lambda_(lambda), x_(x) { detail::check_lambda(lambda); }

    unsigned degree() const noexcept { return degree_; }
    const V& value() const noexcept { return current_; }
    double log_scale() const noexcept { return log_scale_; }

    void advance() {
        V next;
        if (degree_ == 0) {
            next = 2.0 * lambda_ * x_;
        } else {
            const double n = degree_ + 1.0;
            next = (2.0 * (n + lambda_ - 1.0) * x_ * current_ - (n + 2.0 * lambda_ - 2.0) * previous_) / n;
        }
        previous_ = current_;
        current_ = next;
        ++degree_;
        if (detail::magnitude_bound(current_) > detail::kRescaleThreshold) {
            previous_ *= detail::kRescaleFactor;
            current_ *= detail::kRescaleFactor;
            log_scale_ += detail::kRescaleLog;
        }
    }

    void advance_to(unsigned l) {
        while (degree_ < l) {
            advance();
        }
    }

    ScaledValue scaled() const {
        if (current_ == V(0)) {
            return {-std::numeric_limits<double>::infinity(), 0.0};
        }
        return {std::log(std::abs(current_)) + log_scale_, std::arg(std::complex<double>(current_))};
    }

private:
    double lambda_;
    V x_;
    unsigned degree_ = 0;
    V previous_ = V(0);
    V current_ = V(1);
    double log_scale_ = 0.0;
};

namespace detail {

template <class V>
V gegenbauer_eval_impl(unsigned l, double lambda, V x, unsigned max_degree) {
    if (l > max_degree) {
        throw domain_error("degree " + std::to_string(l) + " exceeds configured maximum " +
                           std::to_string(max_degree));
    }
    GegenbauerRecurrence<V> rec(lambda, x);
    rec.advance_to(l);
    const V value = rec.value() * std::exp(rec.log_scale());
    if (!is_finite(value)) {
        throw overflow_error("magnitude overflow, use gegenbauer_eval_scaled (l = " + std::to_string(l) + ")");
    }
    return value;
}

}  // namespace detail

// Real arguments run the recurrence in long double: near a zero of C_l the double
// recurrence loses about l ulps of the result.
inline double gegenbauer_eval(unsigned l, double lambda, double x, unsigned max_degree = kDefaultMaxDegree) {
    const auto value = static_cast<double>(detail::gegenbauer_eval_impl<long double>(l, lambda, x, max_degree));
    if (!std::isfinite(value)) {
        throw overflow_error("magnitude overflow, use gegenbauer_eval_scaled (l = " + std::to_string(l) + ")");
    }
    return value;
}

inline std::complex<double> gegenbauer_eval(unsigned l, double lambda, std::complex<double> x,
                                             unsigned max_degree = kDefaultMaxDegree) {
    return detail::gegenbauer_eval_impl(l, lambda, x, max_degree);
}

// ln C_l^lambda(x) for x > 1, where the polynomial is positive and grows like
// exp(l * acosh(x)).
inline ScaledValue gegenbauer_eval_scaled(unsigned l, double lambda, double x,
                                          unsigned max_degree = kDefaultMaxDegree) {
    if (!(x > 1.0)) {
        throw domain_error("gegenbauer_eval_scaled requires x > 1 (oscillatory region; use gegenbauer_eval)");
    }
    if (l > max_degree) {
        throw domain_error("degree exceeds configured maximum");
    }
    GegenbauerRecurrence<double> rec(lambda, x);
    rec.advance_to(l);
    return rec.scaled();
}

// Same representation for arbitrary complex arguments.
inline ScaledValue gegenbauer_eval_scaled(unsigned l, double lambda, std::complex<double> x,
                                          unsigned max_degree = kDefaultMaxDegree) {
    if (l > max_degree) {
        throw domain_error("degree exceeds configured maximum");
    }
    GegenbauerRecurrence<std::complex<double>> rec(lambda, x);
    rec.advance_to(l);
    return rec.scaled();
}

// C_l^lambda(1) = Gamma(l + 2 lambda) / (Gamma(2 lambda) l!).
inline double gegenbauer_log_value_at_one(unsigned l, double lambda) {
    using boost::math::lgamma;
    return lgamma(l + 2.0 * lambda) - lgamma(2.0 * lambda) - lgamma(l + 1.0);
}

// Hypergeometric form in z = (1 - x) / 2:
//
//   C_l^lambda(x) = Gamma(lambda + 1/2) / Gamma(2 lambda)
//       * sum_{k=0}^{l} Gamma(2 lambda + l + k) / (k! (l - k)! Gamma(lambda + k + 1/2)) (-z)^k
//
// Returns the log of each (positive) coefficient of (-z)^k.  Templated on Real so that
// tests can instantiate it with a multiprecision type.
template <class Real>
std::vector<Real> gegenbauer_series_log_coefficients(unsigned l, const Real& lambda) {
    using boost::math::lgamma;
    if (l > kSeriesMaxDegree) {
        throw domain_error("series form is limited to l <= " + std::to_string(kSeriesMaxDegree));
    }
    // Arguments are materialized as Real so that expression-template types do not
    // select a lower-precision overload.
    const Real half = Real(1) / 2;
    const Real two_lambda = Real(2 * lambda);
    const Real prefactor = Real(lgamma(Real(lambda + half)) - lgamma(two_lambda));
    std::vector<Real> log_coefficients;
    log_coefficients.reserve(l + 1);
    for (unsigned k = 0; k <= l; ++k) {
        const Real a = two_lambda + Real(l + k);
        const Real b = lambda + Real(k) + half;
        log_coefficients.push_back(Real(prefactor + lgamma(a) - lgamma(Real(k + 1)) - lgamma(Real(l - k + 1)) -
                                        lgamma(b)));
    }
    return log_coefficients;
}

template <class Real, class Z>
Z gegenbauer_series_from_coefficients(const std::vector<Real>& log_coefficients, const Z& z) {
    using std::exp;
    const Z minus_z = -z;
    Z power = Z(1);
    Z sum = Z(0);
    for (const Real& log_c : log_coefficients) {
        sum += Z(exp(log_c)) * power;
        power *= minus_z;
    }
    return sum;
}

template <class Real, class Z>
Z gegenbauer_series(unsigned l, const Real& lambda, const Z& z) {
    return gegenbauer_series_from_coefficients(gegenbauer_series_log_coefficients(l, lambda), z);
}

// Squared norm of C_n^lambda under the weight (1 - x^2)^(lambda - 1/2):
//   pi 2^(1 - 2 lambda) Gamma(n + 2 lambda) / (n! (n + lambda) Gamma(lambda)^2).
inline double gegenbauer_norm(unsigned n, double lambda) {
    using boost::math::lgamma;
    const double log_norm = std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::numbers::ln2 +
                            lgamma(n + 2.0 * lambda) - lgamma(n + 1.0) - std::log(n + lambda) -
                            2.0 * lgamma(lambda);
    return std::exp(log_norm);
}

// Integral over [-1, 1] of C_m C_n (1 - x^2)^(lambda - 1/2), computed in the angle
// variable x = cos(theta) where the integrand C_m C_n sin^(2 lambda) is bounded.
inline double orthogonality_integral(unsigned m, unsigned n, double lambda) {
    detail::check_lambda(lambda);
    if (lambda < 0.5) {
        throw domain_error("orthogonality_integral supports lambda >= 1/2 only");
    }
    if (m > kOrthogonalityMaxDegree || n > kOrthogonalityMaxDegree) {
        throw domain_error("orthogonality_integral supports degrees <= 64");
    }
    auto integrand = [&](double theta) {
        const double x = std::cos(theta);
        return gegenbauer_eval(m, lambda, x) * gegenbauer_eval(n, lambda, x) *
               std::pow(std::sin(theta), 2.0 * lambda);
    };
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::numbers::pi, 15,
                                                                          1e-12, &error);
}

// Angles 0 < theta_1 < ... < theta_l < pi with C_l^lambda(cos theta_nu) = 0.
// Brackets come from sign changes on the angle grid (j + 1/2) pi / (8 l); each bracket
// is refined by Newton in theta, falling back to bisection when a step leaves it.
inline std::vector<double> gegenbauer_zero_angles(unsigned l, double lambda) {
    detail::check_lambda(lambda);
    if (l == 0) {
        throw domain_error("C_0 has no zeros; l must be >= 1");
    }
    auto f = [&](double theta) { return gegenbauer_eval(l, lambda, std::cos(theta)); };
    // d/dtheta C_l(cos theta) = -sin(theta) * 2 lambda C_{l-1}^{lambda+1}(cos theta)
    auto df = [&](double theta) {
        return -std::sin(theta) * 2.0 * lambda * gegenbauer_eval(l - 1, lambda + 1.0, std::cos(theta));
    };

    constexpr double kAngleTolerance = 1e-13;
    const unsigned grid_points = 8 * l;
    const double step = std::numbers::pi / grid_points;

    std::vector<double> zeros;
    zeros.reserve(l);
    double a = 0.5 * step;
    double fa = f(a);
    for (unsigned j = 1; j < grid_points; ++j) {
        const double b = (j + 0.5) * step;
        const double fb = f(b);
        if (fa == 0.0) {
            zeros.push_back(a);
        } else if (fa * fb < 0.0) {
            double lo = a, flo = fa, hi = b;
            double theta = 0.5 * (a + b);
            for (int iter = 0; iter < 200; ++iter) {
                const double value = f(theta);
                if (value == 0.0) {
                    break;
                }
                if ((value < 0.0) == (flo < 0.0)) {
                    lo = theta;
                    flo = value;
                } else {
                    hi = theta;
                }
                const double slope = df(theta);
                double next = slope != 0.0 ? theta - value / slope : lo - 1.0;
                if (!(next > lo && next < hi)) {
                    next = 0.5 * (lo + hi);
                }
                const bool done = std::abs(next - theta) < kAngleTolerance || hi - lo < kAngleTolerance;
                theta = next;
                if (done) {
                    break;
                }
            }
            zeros.push_back(theta);
        }
        a = b;
        fa = fb;
    }
    if (zeros.size() != l) {
        throw convergence_error("found " + std::to_string(zeros.size()) + " zeros of C_" + std::to_string(l) +
                                ", expected " + std::to_string(l));
    }
    return zeros;
}

}  // namespace hdamp
