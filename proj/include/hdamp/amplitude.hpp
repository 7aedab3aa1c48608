#pragma once

// D-dimensional elastic amplitude from a finite list of partial waves:
//
//   F(s, t) = A1 s^(1/2 - lambda) sum_l (l + lambda) f_l C_l^lambda(1 + 2t/s)
//
// with A1 = 2^(4 lambda + 3) pi^lambda Gamma(lambda).  s is always the dimensionless
// ratio s / s_hat.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "hdamp/errors.hpp"
#include "hdamp/specfun.hpp"

namespace hdamp {

using complex = std::complex<double>;

// ln A1(lambda).
inline double log_normalization_A1(double lambda) {
    using boost::math::lgamma;
    return (4.0 * lambda + 3.0) * std::numbers::ln2 + lambda * std::log(std::numbers::pi) + lgamma(lambda);
}

inline double normalization_A1(double lambda) { return std::exp(log_normalization_A1(lambda)); }

struct Kinematics {
    double s;
    complex t;
    complex x;  // cos(theta) = 1 + 2t/s

    static Kinematics at(double s, complex t) {
        if (!(s > 0.0)) {
            throw domain_error("s must be positive");
        }
        return {s, t, 1.0 + 2.0 * t / s};
    }

    bool is_forward() const { return t == complex(0.0); }
};

// s_trunc = (N - 1)/2 * sqrt(s / T0) * ln s and its ceiling.
struct TruncationOrder {
    double value;
    unsigned cutoff;
};

inline TruncationOrder truncation_order(double s, double N, double T0) {
    if (!(s > 1.0)) {
        throw domain_error("truncation_order requires s > 1 so that ln s > 0");
    }
    if (!(N >= 1.0) || !(T0 > 0.0)) {
        throw domain_error("truncation_order requires N >= 1 and T0 > 0");
    }
    const double L = 0.5 * (N - 1.0) * std::sqrt(s / T0) * std::log(s);
    return {L, static_cast<unsigned>(std::ceil(L))};
}

struct UnitarityViolation {
    unsigned l;
    double modulus_squared;
    double imaginary_part;
};

struct UnitarityReport {
    bool pass = true;
    std::vector<UnitarityViolation> violations;
};

// 0 <= |f_l|^2 <= Im f_l <= 1 for every l.
inline UnitarityReport unitarity_report(std::span<const complex> waves) {
    UnitarityReport report;
    for (unsigned l = 0; l < waves.size(); ++l) {
        const double modulus_squared = std::norm(waves[l]);
        const double im = waves[l].imag();
        if (!(modulus_squared <= im && im <= 1.0)) {
            report.violations.push_back({l, modulus_squared, im});
        }
    }
    report.pass = report.violations.empty();
    return report;
}

// Immutable: dimension, energy ratio s and the waves f_0 .. f_{L_rep}.
class PartialWaveSet {
public:
    PartialWaveSet(DimensionSpec dim, double s, std::vector<complex> waves)
        : dim_(dim), s_(s), waves_(std::move(waves)) {
        if (!(s_ > 0.0) || !std::isfinite(s_)) {
            throw domain_error("PartialWaveSet requires finite s > 0");
        }
        if (waves_.empty()) {
            throw domain_error("PartialWaveSet requires at least one wave");
        }
        for (const complex& f : waves_) {
            if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
                throw domain_error("PartialWaveSet waves must be finite");
            }
        }
        unitary_ = unitarity_report(waves_).pass;
    }

    const DimensionSpec& dim() const noexcept { return dim_; }
    double lambda() const noexcept { return dim_.lambda(); }
    double s() const noexcept { return s_; }
    std::span<const complex> waves() const noexcept { return waves_; }
    unsigned max_l() const noexcept { return static_cast<unsigned>(waves_.size() - 1); }
    bool is_unitary() const noexcept { return unitary_; }

private:
    DimensionSpec dim_;
    double s_;
    std::vector<complex> waves_;
    bool unitary_ = false;
};

inline UnitarityReport unitarity_report(const PartialWaveSet& pw) { return unitarity_report(pw.waves()); }

// Im f_l = 1 for l <= cutoff.
struct GrayDisk {
    unsigned cutoff = 0;
};

// f_l = i g exp(-l / decay_scale) for l <= max_l (default ceil(40 * decay_scale)).
struct ExponentialTail {
    double amplitude = 1.0;
    double decay_scale = 1.0;
    std::optional<unsigned> max_l;
};

struct CustomList {
    std::vector<complex> waves;
};

using ModelSpec = std::variant<GrayDisk, ExponentialTail, CustomList>;

inline constexpr double kExponentialTailSpan = 40.0;

inline PartialWaveSet build_model(const ModelSpec& spec, double s, DimensionSpec dim) {
    struct Builder {
        double s;
        DimensionSpec dim;

        PartialWaveSet operator()(const GrayDisk& m) const {
            return PartialWaveSet(dim, s, std::vector<complex>(m.cutoff + 1, complex(0.0, 1.0)));
        }
        PartialWaveSet operator()(const ExponentialTail& m) const {
            if (!(m.amplitude > 0.0 && m.amplitude <= 1.0)) {
                throw domain_error("exponential_tail amplitude must lie in (0, 1] to respect unitarity");
            }
            if (!(m.decay_scale > 0.0) || !std::isfinite(m.decay_scale)) {
                throw domain_error("exponential_tail decay scale must be positive");
            }
            const unsigned max_l = m.max_l.value_or(
                static_cast<unsigned>(std::ceil(kExponentialTailSpan * m.decay_scale)));
            std::vector<complex> waves(max_l + 1);
            for (unsigned l = 0; l <= max_l; ++l) {
                waves[l] = complex(0.0, m.amplitude * std::exp(-static_cast<double>(l) / m.decay_scale));
            }
            return PartialWaveSet(dim, s, std::move(waves));
        }
        PartialWaveSet operator()(const CustomList& m) const { return PartialWaveSet(dim, s, m.waves); }
    };
    return std::visit(Builder{s, dim}, spec);
}

namespace detail {

inline constexpr double kLogDoubleMax = 709.782712893384;

// sum_l (l + lambda) c_l C_l^lambda(x), kept in the recurrence's scaled frame so the
// partial sums never overflow.  Returns the scaled value including A1 s^(1/2 - lambda).
template <class CoefficientFn>
ScaledValue weighted_gegenbauer_sum(const PartialWaveSet& pw, complex t, CoefficientFn coefficient,
                                    unsigned* first_huge_l = nullptr) {
    const double lambda = pw.lambda();
    const Kinematics kin = Kinematics::at(pw.s(), t);
    const double log_prefactor = log_normalization_A1(lambda) + (0.5 - lambda) * std::log(pw.s());

    GegenbauerRecurrence<complex> rec(lambda, kin.x);
    complex sum = 0.0;
    std::optional<unsigned> huge;
    for (unsigned l = 0; l <= pw.max_l(); ++l) {
        if (l > 0) {
            const double before = rec.log_scale();
            rec.advance();
            if (rec.log_scale() != before) {
                sum *= kRescaleFactor;
            }
        }
        const complex c = coefficient(l);
        if (c == complex(0.0)) {
            continue;
        }
        const complex term = (l + lambda) * c * rec.value();
        sum += term;
        if (!huge && std::log(std::abs(term)) + rec.log_scale() + log_prefactor > kLogDoubleMax) {
            huge = l;
        }
    }
    if (first_huge_l != nullptr) {
        *first_huge_l = huge.value_or(pw.max_l());
    }
    if (sum == complex(0.0)) {
        return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    return {std::log(std::abs(sum)) + rec.log_scale() + log_prefactor, std::arg(sum)};
}

inline complex to_complex_checked(const ScaledValue& v, unsigned offending_l) {
    if (v.log_magnitude > kLogDoubleMax) {
        throw overflow_error("amplitude not representable in double; first overflowing term at l = " +
                             std::to_string(offending_l));
    }
    if (v.log_magnitude == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    return v.to_complex();
}

}  // namespace detail

inline ScaledValue amplitude_scaled(const PartialWaveSet& pw, complex t) {
    const auto waves = pw.waves();
    return detail::weighted_gegenbauer_sum(pw, t, [&](unsigned l) { return waves[l]; });
}

// Continuation of Im F built from Im f_l only; real on the real t axis.
inline ScaledValue absorptive_scaled(const PartialWaveSet& pw, complex t) {
    const auto waves = pw.waves();
    return detail::weighted_gegenbauer_sum(pw, t, [&](unsigned l) { return complex(waves[l].imag()); });
}

inline complex eval_amplitude(const PartialWaveSet& pw, complex t) {
    const auto waves = pw.waves();
    unsigned offending = 0;
    const ScaledValue v = detail::weighted_gegenbauer_sum(pw, t, [&](unsigned l) { return waves[l]; }, &offending);
    return detail::to_complex_checked(v, offending);
}

inline complex absorptive_eval(const PartialWaveSet& pw, complex t) {
    const auto waves = pw.waves();
    unsigned offending = 0;
    const ScaledValue v = detail::weighted_gegenbauer_sum(
        pw, t, [&](unsigned l) { return complex(waves[l].imag()); }, &offending);
    return detail::to_complex_checked(v, offending);
}

// Optical theorem normalization: Im F(s, 0) = s sigma_t.
inline double total_cross_section(const PartialWaveSet& pw) { return absorptive_eval(pw, 0.0).real() / pw.s(); }

}  // namespace hdamp
