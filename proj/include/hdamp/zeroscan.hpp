#pragma once

// Zero counting by the argument principle and zero isolation by recursive
// quadrisection, applied to F(s, t) in the complex t plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdamp/amplitude.hpp"
#include "hdamp/bounds.hpp"
#include "hdamp/errors.hpp"

namespace hdamp {

struct Circle {
    complex center = 0.0;
    double radius = 1.0;
};

// Axis-aligned box, traversed counter-clockwise from the lower-left corner.
struct Rectangle {
    complex lower_left;
    complex upper_right;

    double width() const { return upper_right.real() - lower_left.real(); }
    double height() const { return upper_right.imag() - lower_left.imag(); }
    complex center() const { return 0.5 * (lower_left + upper_right); }
};

struct Contour {
    std::variant<Circle, Rectangle> shape;
    unsigned samples = 256;

    void validate() const {
        if (samples < 64 || (samples & (samples - 1)) != 0) {
            throw domain_error("contour samples must be a power of two >= 64");
        }
        if (const auto* c = std::get_if<Circle>(&shape); c != nullptr && !(c->radius > 0.0)) {
            throw domain_error("circle radius must be positive");
        }
        if (const auto* r = std::get_if<Rectangle>(&shape); r != nullptr && !(r->width() > 0.0 && r->height() > 0.0)) {
            throw domain_error("rectangle must have positive width and height");
        }
    }

    // Radius of a circle, longer side of a rectangle.
    double size() const {
        if (const auto* c = std::get_if<Circle>(&shape)) {
            return c->radius;
        }
        const auto& r = std::get<Rectangle>(shape);
        return std::max(r.width(), r.height());
    }

    // Point at parameter u in [0, 1).
    complex point(double u) const {
        if (const auto* c = std::get_if<Circle>(&shape)) {
            return c->center + std::polar(c->radius, 2.0 * std::numbers::pi * u);
        }
        const auto& r = std::get<Rectangle>(shape);
        const double w = r.width(), h = r.height();
        double d = u * 2.0 * (w + h);
        if (d < w) {
            return r.lower_left + complex(d, 0.0);
        }
        d -= w;
        if (d < h) {
            return complex(r.upper_right.real(), r.lower_left.imag() + d);
        }
        d -= h;
        if (d < w) {
            return r.upper_right - complex(d, 0.0);
        }
        d -= w;
        return complex(r.lower_left.real(), r.upper_right.imag() - d);
    }
};

struct WindingOptions {
    unsigned max_samples = 1u << 20;
    // |f| on the contour must exceed noise_factor times the evaluation noise.
    double noise_factor = 1e3;
    // Defaults to machine epsilon times max |f| on the contour.
    std::optional<double> noise_estimate;
    // Also require |f'/f| times the local step below 1 at every sample, i.e. spacing
    // finer than the distance to the nearest zero.  One extra evaluation per sample.
    bool log_derivative_check = true;
};

struct WindingResult {
    int count = 0;
    unsigned samples_used = 0;
    double min_modulus = 0.0;
    double max_modulus = 0.0;
};

// Total phase change of f around the contour divided by 2 pi.  Samples double
// until every principal-branch increment is below pi/2, the log-derivative test
// passes, and the count agrees with the previous level.
template <class F>
WindingResult winding_scan(F&& f, const Contour& contour, const WindingOptions& options = {}) {
    contour.validate();
    unsigned n = contour.samples;
    const double delta = 1e-7 * contour.size();
    // |f'/f| at a sample, from a forward difference; 0 when the check is off.
    auto log_derivative = [&](complex t, complex ft) {
        if (!options.log_derivative_check || ft == complex(0.0)) {
            return 0.0;
        }
        return std::abs((f(t + delta) - ft) / (delta * ft));
    };
    std::vector<complex> values(n);
    std::vector<double> rates(n);
    for (unsigned k = 0; k < n; ++k) {
        const complex t = contour.point(static_cast<double>(k) / n);
        values[k] = f(t);
        rates[k] = log_derivative(t, values[k]);
    }

    std::optional<int> previous;
    while (true) {
        double min_mod = std::numeric_limits<double>::infinity(), max_mod = 0.0;
        unsigned argmin = 0;
        for (unsigned k = 0; k < n; ++k) {
            const double m = std::abs(values[k]);
            if (!std::isfinite(m)) {
                throw overflow_error("non-finite function value on contour");
            }
            if (m < min_mod) {
                min_mod = m;
                argmin = k;
            }
            max_mod = std::max(max_mod, m);
        }
        const double noise = options.noise_estimate.value_or(std::numeric_limits<double>::epsilon() * max_mod);
        if (!(min_mod > options.noise_factor * noise)) {
            throw zero_on_contour_error("function vanishes (numerically) on the contour",
                                        (argmin + n - 1.0) / n - std::floor((argmin + n - 1.0) / n),
                                        (argmin + 1.0) / n);
        }

        double total = 0.0, largest = 0.0, sharpest = 0.0;
        for (unsigned k = 0; k < n; ++k) {
            const double step = std::arg(values[(k + 1) % n] / values[k]);
            total += step;
            largest = std::max(largest, std::abs(step));
            const complex here = contour.point(static_cast<double>(k) / n);
            const double h = std::max(std::abs(contour.point(static_cast<double>((k + 1) % n) / n) - here),
                                      std::abs(contour.point(static_cast<double>((k + n - 1) % n) / n) - here));
            sharpest = std::max(sharpest, rates[k] * h);
        }
        const int count = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
        const bool resolved = largest < 0.5 * std::numbers::pi && sharpest < 1.0;
        if (resolved && previous && *previous == count) {
            return {count, n, min_mod, max_mod};
        }
        previous = resolved ? std::optional<int>(count) : std::nullopt;

        if (2ull * n > options.max_samples) {
            throw convergence_error("winding number did not stabilize within " +
                                    std::to_string(options.max_samples) + " samples");
        }
        std::vector<complex> refined(2 * n);
        std::vector<double> refined_rates(2 * n);
        for (unsigned k = 0; k < n; ++k) {
            refined[2 * k] = values[k];
            refined_rates[2 * k] = rates[k];
            const complex t = contour.point((2.0 * k + 1.0) / (2.0 * n));
            refined[2 * k + 1] = f(t);
            refined_rates[2 * k + 1] = log_derivative(t, refined[2 * k + 1]);
        }
        values = std::move(refined);
        rates = std::move(refined_rates);
        n *= 2;
    }
}

template <class F>
int winding_number(F&& f, const Contour& contour, const WindingOptions& options = {}) {
    return winding_scan(std::forward<F>(f), contour, options).count;
}

struct LocatedZero {
    complex location;
    // |f(location)| divided by max |f| on the census circle.
    double residual;
};

struct UnresolvedBox {
    Rectangle box;
    int count;
    std::string reason;
};

struct ZeroCensus {
    double disk_radius = 0.0;
    int winding_count = 0;
    std::vector<LocatedZero> zeros;
    double jensen_rhs = std::numeric_limits<double>::quiet_NaN();
    double min_modulus_on_contour = 0.0;
    std::vector<UnresolvedBox> unresolved;

    bool complete() const { return unresolved.empty() && static_cast<int>(zeros.size()) == winding_count; }
};

struct CensusOptions {
    unsigned circle_samples = 256;
    unsigned box_samples = 128;
    // A sub-box whose winding number needs more samples is split along another line.
    unsigned box_max_samples = 1u << 14;
    int max_depth = 40;
    // Boxes below this fraction of the radius are reported instead of split.
    double min_box_fraction = 1e-12;
    double residual_tolerance = 1e-8;
    double jensen_delta = std::exp(-2.0);
    unsigned jensen_samples = 4096;
    bool compute_jensen = true;
    WindingOptions winding;
};

namespace detail {

// Damped Newton with a centered finite-difference derivative.
template <class F>
std::optional<complex> newton_refine(F& f, complex start, double radius, double scale, double tolerance) {
    complex z = start;
    complex fz = f(z);
    for (int iter = 0; iter < 100; ++iter) {
        if (std::abs(fz) <= 0.25 * std::numeric_limits<double>::epsilon() * scale) {
            break;
        }
        const double h = 1e-6 * std::max(std::abs(z), radius * 1e-3);
        const complex derivative = (f(z + h) - f(z - h)) / (2.0 * h);
        if (derivative == complex(0.0)) {
            break;
        }
        const complex step = fz / derivative;
        double damping = 1.0;
        complex next = z - step;
        complex f_next = f(next);
        while (!(std::abs(f_next) < std::abs(fz)) && damping > 1e-4) {
            damping *= 0.5;
            next = z - damping * step;
            f_next = f(next);
        }
        if (!(std::abs(f_next) < std::abs(fz))) {
            break;
        }
        const bool small_step = std::abs(next - z) <= 1e-15 * std::max(std::abs(next), radius);
        z = next;
        fz = f_next;
        if (small_step) {
            break;
        }
    }
    if (!(std::abs(fz) <= tolerance * scale)) {
        return std::nullopt;
    }
    return z;
}

inline bool box_meets_disk(const Rectangle& box, double radius) {
    const double cx = std::clamp(0.0, box.lower_left.real(), box.upper_right.real());
    const double cy = std::clamp(0.0, box.lower_left.imag(), box.upper_right.imag());
    return std::hypot(cx, cy) <= radius;
}

inline bool box_holds(const Rectangle& box, complex z, double margin) {
    return z.real() >= box.lower_left.real() - margin && z.real() <= box.upper_right.real() + margin &&
           z.imag() >= box.lower_left.imag() - margin && z.imag() <= box.upper_right.imag() + margin;
}

template <class F>
class Quadrisection {
public:
    Quadrisection(F& f, double radius, double scale, const CensusOptions& options)
        : f_(f), radius_(radius), scale_(scale), options_(options) {}

    void run(const Rectangle& box, int count, int depth) {
        if (count <= 0 || !box_meets_disk(box, radius_)) {
            return;
        }
        const double size = std::max(box.width(), box.height());
        if (count == 1) {
            if (auto z = newton_refine(f_, box.center(), radius_, scale_, options_.residual_tolerance);
                z && box_holds(box, *z, 1e-9 * radius_)) {
                zeros_.push_back({*z, std::abs(f_(*z)) / scale_});
                return;
            }
        }
        if (depth >= options_.max_depth || size < options_.min_box_fraction * radius_) {
            // Tight cluster (or a multiple zero): one refined location, repeated count times.
            if (auto z = newton_refine(f_, box.center(), radius_, scale_, options_.residual_tolerance)) {
                for (int i = 0; i < count; ++i) {
                    zeros_.push_back({*z, std::abs(f_(*z)) / scale_});
                }
            } else {
                unresolved_.push_back({box, count, "refinement did not converge"});
            }
            return;
        }
        // Never the exact center: F is real on the real axis, so real zeros are common
        // and a split line through a symmetric box would run straight through them.
        static constexpr std::array<double, 6> kSplitOffsets = {0.0137, -0.0291, 0.0419, -0.0577, 0.0733, -0.0859};
        // First pass with the sub-box sample cap, second without it (a zero close to
        // an edge every split shares).
        WindingOptions capped = options_.winding;
        capped.max_samples = std::min(capped.max_samples, options_.box_max_samples);
        for (const WindingOptions& box_winding : {capped, options_.winding}) {
            for (const double offset : kSplitOffsets) {
                const complex mid = box.center() + offset * complex(box.width(), box.height());
                const std::array<Rectangle, 4> children = {
                    Rectangle{box.lower_left, mid},
                    Rectangle{complex(mid.real(), box.lower_left.imag()), complex(box.upper_right.real(), mid.imag())},
                    Rectangle{mid, box.upper_right},
                    Rectangle{complex(box.lower_left.real(), mid.imag()), complex(mid.real(), box.upper_right.imag())},
                };
                std::array<int, 4> counts{};
                bool ok = true;
                int total = 0;
                for (std::size_t i = 0; i < 4 && ok; ++i) {
                    try {
                        counts[i] = winding_number(f_, Contour{children[i], options_.box_samples}, box_winding);
                        total += counts[i];
                    } catch (const zero_on_contour_error&) {
                        ok = false;
                    } catch (const convergence_error&) {
                        ok = false;
                    }
                }
                if (!ok || total != count) {
                    continue;
                }
                for (std::size_t i = 0; i < 4; ++i) {
                    run(children[i], counts[i], depth + 1);
                }
                return;
            }
        }
        unresolved_.push_back({box, count, "no split line avoided the zeros"});
    }

    std::vector<LocatedZero>& zeros() { return zeros_; }
    std::vector<UnresolvedBox>& unresolved() { return unresolved_; }

private:
    F& f_;
    double radius_;
    double scale_;
    const CensusOptions& options_;
    std::vector<LocatedZero> zeros_;
    std::vector<UnresolvedBox> unresolved_;
};

}  // namespace detail

// Census of the zeros of an analytic f in |t| < radius.  jensen_rhs is
// ln(max_{|t| = radius/delta} |f| / |f(0)|) / ln(1/delta).
template <class F>
ZeroCensus zero_census_of(F f, double radius, const CensusOptions& options = {}) {
    if (!(radius > 0.0)) {
        throw domain_error("census radius must be positive");
    }
    ZeroCensus census;
    census.disk_radius = radius;

    const WindingResult circle = winding_scan(f, Contour{Circle{0.0, radius}, options.circle_samples}, options.winding);
    census.winding_count = circle.count;
    census.min_modulus_on_contour = circle.min_modulus;
    const double scale = circle.max_modulus;

    if (circle.count > 0) {
        detail::Quadrisection<F> search(f, radius, scale, options);
        bool started = false;
        for (const double pad : {0.01, 0.0313, 0.0571, 0.0897}) {
            const double half = radius * (1.0 + pad);
            const Rectangle box{complex(-half, -half), complex(half, half)};
            int box_count = 0;
            try {
                box_count = winding_number(f, Contour{box, options.circle_samples}, options.winding);
            } catch (const zero_on_contour_error&) {
                continue;
            } catch (const convergence_error&) {
                continue;
            }
            search.run(box, box_count, 0);
            started = true;
            break;
        }
        if (!started) {
            census.unresolved.push_back(
                {Rectangle{complex(-radius, -radius), complex(radius, radius)}, circle.count, "bounding box failed"});
        }
        for (const LocatedZero& z : search.zeros()) {
            if (std::abs(z.location) < radius) {
                census.zeros.push_back(z);
            }
        }
        for (UnresolvedBox& b : search.unresolved()) {
            census.unresolved.push_back(std::move(b));
        }
    }
    std::sort(census.zeros.begin(), census.zeros.end(), [](const LocatedZero& a, const LocatedZero& b) {
        if (a.location.real() != b.location.real()) {
            return a.location.real() < b.location.real();
        }
        return a.location.imag() < b.location.imag();
    });

    if (options.compute_jensen) {
        const double f0 = std::abs(f(complex(0.0)));
        if (!(f0 > 0.0)) {
            throw domain_error("Jensen bound requires f(0) != 0");
        }
        const double outer = radius / options.jensen_delta;
        double max_mod = 0.0;
        for (unsigned k = 0; k < options.jensen_samples; ++k) {
            max_mod = std::max(max_mod, std::abs(f(std::polar(outer, 2.0 * std::numbers::pi * k / options.jensen_samples))));
        }
        census.jensen_rhs = std::log(max_mod / f0) / std::log(1.0 / options.jensen_delta);
    }
    return census;
}

inline ZeroCensus zero_census(const PartialWaveSet& pw, double radius, const BoundContext& ctx,
                              const CensusOptions& options = {}) {
    if (!(radius < ctx.T0)) {
        throw domain_error("census radius must be below T0");
    }
    if (eval_amplitude(pw, 0.0) == complex(0.0)) {
        throw domain_error("zero census requires F(s, 0) != 0");
    }
    return zero_census_of([&pw](complex t) { return eval_amplitude(pw, t); }, radius, options);
}

struct JensenCheck {
    bool holds;
    int count;
    double rhs_numeric;
    // Closed-form count bound; NaN when ln s <= 0.
    double rhs_closed_form;
};

inline JensenCheck check_jensen(const PartialWaveSet& pw, double radius, const BoundContext& ctx,
                                const CensusOptions& options = {}) {
    CensusOptions counting = options;
    counting.compute_jensen = true;
    const ZeroCensus census = zero_census(pw, radius, ctx, counting);
    const double s_phys = pw.s() * ctx.s_hat;
    const double closed_form = s_phys > ctx.s_hat ? jensen_count_bound(radius, s_phys, ctx, true)
                                             : std::numeric_limits<double>::quiet_NaN();
    return {census.winding_count <= census.jensen_rhs, census.winding_count, census.jensen_rhs, closed_form};
}

}  // namespace hdamp
