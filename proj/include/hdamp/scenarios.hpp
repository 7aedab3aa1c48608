#pragma once

// Scenario runner: each scenario evaluates the library over a grid, collects a
// flat table of rows, derives pass/fail verdicts from the rows and emits plot
// series.  Grid points run in parallel; results are assembled in grid order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hdamp/amplitude.hpp"
#include "hdamp/bounds.hpp"
#include "hdamp/config.hpp"
#include "hdamp/errors.hpp"
#include "hdamp/harnack.hpp"
#include "hdamp/io.hpp"
#include "hdamp/parallel.hpp"
#include "hdamp/random.hpp"
#include "hdamp/specfun.hpp"
#include "hdamp/zeroscan.hpp"

namespace hdamp {

inline constexpr const char* kVersion = "0.1.0";

struct Verdict {
    std::string name;
    bool pass;
    std::string detail;
};

struct Series {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
};

using Row = std::vector<double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    std::size_t index(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            throw std::out_of_range("no column " + name);
        }
        return static_cast<std::size_t>(it - columns.begin());
    }

    // Primary key s, then l, then t, then the remaining columns in order.
    void sort_rows() {
        std::vector<std::size_t> keys;
        for (const char* name : {"s", "l", "t"}) {
            if (std::find(columns.begin(), columns.end(), name) != columns.end()) {
                keys.push_back(index(name));
            }
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (std::find(keys.begin(), keys.end(), c) == keys.end()) {
                keys.push_back(c);
            }
        }
        std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
            for (const std::size_t k : keys) {
                if (a[k] < b[k]) {
                    return true;
                }
                if (b[k] < a[k]) {
                    return false;
                }
            }
            return false;
        });
    }
};

struct ScanReport {
    Scenario scenario;
    std::string description;
    KeyValues config;
    Table table;
    std::vector<Verdict> verdicts;
    std::vector<Series> series;
    std::uint64_t seed = 1;
    std::string timestamp;

    bool pass() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
    }

    const Series* find_series(const std::string& name) const {
        for (const Series& s : series) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    const Verdict* find_verdict(const std::string& name) const {
        for (const Verdict& v : verdicts) {
            if (v.name == name) {
                return &v;
            }
        }
        return nullptr;
    }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

struct TaskOutcome {
    std::vector<Row> rows;
    std::string error;
};

// Runs fn(i) for every task; an exception becomes an error message tagged with label(i).
template <class Fn, class Label>
std::vector<TaskOutcome> run_tasks(std::size_t n, Fn fn, Label label) {
    return parallel_map<TaskOutcome>(n, [&](std::size_t i) {
        try {
            return TaskOutcome{fn(i), {}};
        } catch (const std::exception& e) {
            return TaskOutcome{{}, label(i) + ": " + e.what()};
        }
    });
}

struct Collector {
    Table table;
    std::vector<std::string> errors;

    void add(std::vector<TaskOutcome> outcomes) {
        for (TaskOutcome& o : outcomes) {
            for (Row& r : o.rows) {
                table.rows.push_back(std::move(r));
            }
            if (!o.error.empty()) {
                errors.push_back(std::move(o.error));
            }
        }
    }
};

inline Verdict error_verdict(const std::vector<std::string>& errors) {
    if (errors.empty()) {
        return {"no_suboperation_errors", true, "all grid points evaluated"};
    }
    std::string detail = std::to_string(errors.size()) + " failed: ";
    for (std::size_t i = 0; i < errors.size(); ++i) {
        detail += (i ? "; " : "") + errors[i];
    }
    return {"no_suboperation_errors", false, detail};
}

// Rows of `table` whose column `name` equals `value` exactly.
inline std::vector<const Row*> select(const Table& table, const std::string& name, double value) {
    const std::size_t c = table.index(name);
    std::vector<const Row*> out;
    for (const Row& r : table.rows) {
        if (r[c] == value) {
            out.push_back(&r);
        }
    }
    return out;
}

inline Verdict all_rows(const Table& table, const std::string& verdict, const std::string& column,
                        const std::string& what) {
    const std::size_t c = table.index(column);
    std::size_t failures = 0;
    for (const Row& r : table.rows) {
        if (r[c] != 1.0) {
            ++failures;
        }
    }
    if (table.rows.empty()) {
        return {verdict, false, "no rows evaluated"};
    }
    return {verdict, failures == 0,
            std::to_string(table.rows.size() - failures) + " of " + std::to_string(table.rows.size()) + " " + what};
}

inline Series make_series(const Table& table, const std::string& name, const std::string& x_col,
                          const std::string& y_col, std::string x_label, std::string y_label,
                          std::function<double(double)> fx = {}, std::function<double(double)> fy = {},
                          std::function<bool(const Row&)> keep = {}) {
    Series s{name, std::move(x_label), std::move(y_label), {}};
    const std::size_t xc = table.index(x_col);
    const std::size_t yc = table.index(y_col);
    for (const Row& r : table.rows) {
        if (keep && !keep(r)) {
            continue;
        }
        const double x = fx ? fx(r[xc]) : r[xc];
        const double y = fy ? fy(r[yc]) : r[yc];
        if (std::isfinite(x) && std::isfinite(y)) {
            s.points.emplace_back(x, y);
        }
    }
    return s;
}

inline std::function<bool(const Row&)> where(const Table& table, const std::string& column, double value) {
    const std::size_t c = table.index(column);
    return [c, value](const Row& r) { return r[c] == value; };
}

struct GridPoint {
    int D;
    double s;
};

inline std::vector<GridPoint> dimension_energy_grid(const ScenarioConfig& config) {
    std::vector<GridPoint> grid;
    for (const int D : config.dims) {
        for (const double s : config.s_grid.values()) {
            grid.push_back({D, s});
        }
    }
    return grid;
}

inline std::string label(const GridPoint& p) { return "D=" + std::to_string(p.D) + " s=" + fmt(p.s); }

inline PartialWaveSet model_at(const ScenarioConfig& config, const std::vector<complex>& custom_waves, int D,
                               double s) {
    const BoundContext& ctx = config.ctx;
    const double ratio = ctx.ratio(s);
    const DimensionSpec dim(D);
    switch (config.model.kind) {
        case ModelKind::gray_disk: {
            const unsigned cutoff = config.model.cutoff.value_or(truncation_order(ratio, ctx.N, ctx.T0).cutoff);
            return build_model(GrayDisk{cutoff}, ratio, dim);
        }
        case ModelKind::exponential_tail: {
            const double decay = config.model.decay_scale.value_or(std::sqrt(ratio) / (2.0 * std::sqrt(ctx.T0)));
            return build_model(ExponentialTail{config.model.amplitude, decay, config.model.max_l}, ratio, dim);
        }
        case ModelKind::custom_list:
            return build_model(CustomList{custom_waves}, ratio, dim);
    }
    throw domain_error("unknown model kind");
}

// max_nu |l theta_nu - nu pi| and the nu attaining it.
inline double max_abs_deviation(const std::vector<double>& angles, unsigned l, unsigned* worst) {
    double max_dev = 0.0;
    for (unsigned nu = 1; nu <= angles.size(); ++nu) {
        const double dev = std::abs(l * angles[nu - 1] - nu * std::numbers::pi);
        if (dev > max_dev) {
            max_dev = dev;
            *worst = nu;
        }
    }
    return max_dev;
}

// ---------------------------------------------------------------------------

inline void run_orthogonality(const ScenarioConfig& config, ScanReport& report) {
    struct Task {
        int D;
        unsigned m, n;
    };
    std::vector<Task> tasks;
    for (const int D : config.dims) {
        for (unsigned m = 0; m <= config.orthogonality_l_max; ++m) {
            for (unsigned n = m; n <= config.orthogonality_l_max; ++n) {
                tasks.push_back({D, m, n});
            }
        }
    }
    Collector out;
    out.table.columns = {"D", "lambda", "m", "n", "integral", "norm_m", "norm_n", "relative_error"};
    out.add(run_tasks(
        tasks.size(),
        [&](std::size_t i) {
            const Task& t = tasks[i];
            const double lambda = DimensionSpec(t.D).lambda();
            const double integral = orthogonality_integral(t.m, t.n, lambda);
            const double hm = gegenbauer_norm(t.m, lambda);
            const double hn = gegenbauer_norm(t.n, lambda);
            const double relative = t.m == t.n ? std::abs(integral - hn) / hn : std::abs(integral) / std::min(hm, hn);
            return std::vector<Row>{{double(t.D), lambda, double(t.m), double(t.n), integral, hm, hn, relative}};
        },
        [&](std::size_t i) {
            return "D=" + std::to_string(tasks[i].D) + " m=" + std::to_string(tasks[i].m) +
                   " n=" + std::to_string(tasks[i].n);
        }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;

    const std::size_t cm = table.index("m"), cn = table.index("n"), cr = table.index("relative_error");
    double worst_off = 0.0, worst_diag = 0.0;
    std::size_t off = 0, diag = 0;
    for (const Row& r : table.rows) {
        if (r[cm] == r[cn]) {
            worst_diag = std::max(worst_diag, r[cr]);
            ++diag;
        } else {
            worst_off = std::max(worst_off, r[cr]);
            ++off;
        }
    }
    report.verdicts.push_back({"orthogonality_offdiagonal", off > 0 && worst_off < 1e-10,
                               std::to_string(off) + " pairs m != n, max |integral| / min(norm) = " + fmt(worst_off) +
                                   " (limit 1e-10)"});
    report.verdicts.push_back({"orthogonality_diagonal", diag > 0 && worst_diag < 1e-10,
                               std::to_string(diag) + " diagonal integrals, max relative error against the norm = " +
                                   fmt(worst_diag) + " (limit 1e-10)"});
    report.verdicts.push_back(error_verdict(out.errors));

    Series s{"max_offdiagonal_vs_lambda", "lambda", "max_relative_offdiagonal", {}};
    for (const int D : config.dims) {
        const double lambda = DimensionSpec(D).lambda();
        double worst = 0.0;
        for (const Row* r : select(table, "D", D)) {
            if ((*r)[cm] != (*r)[cn]) {
                worst = std::max(worst, (*r)[cr]);
            }
        }
        s.points.emplace_back(lambda, worst);
    }
    report.series.push_back(std::move(s));
}

inline void run_lemma1(const ScenarioConfig& config, ScanReport& report) {
    struct Trial {
        unsigned l;
        int D;
        double x1, x2;
    };
    // Drawn sequentially so the sample set does not depend on the thread count.
    SeededRng rng(config.seed);
    std::vector<Trial> trials;
    trials.reserve(config.lemma1_trials);
    for (unsigned k = 0; k < config.lemma1_trials; ++k) {
        const int D = config.dims[rng.uniform_int(0, config.dims.size() - 1)];
        const auto l = static_cast<unsigned>(rng.uniform_int(1, config.lemma1_l_max));
        double a = 0.0, b = 0.0;
        while (!(a > 1.0 && b > 1.0 && a != b)) {
            a = 1.0 + config.lemma1_x_span * rng.uniform();
            b = 1.0 + config.lemma1_x_span * rng.uniform();
        }
        trials.push_back({l, D, std::min(a, b), std::max(a, b)});
    }

    Collector out;
    out.table.columns = {"l", "trial", "D", "lambda", "x1", "x2", "log_c1", "log_c2", "increasing", "positive"};
    out.add(run_tasks(
        trials.size(),
        [&](std::size_t i) {
            const Trial& t = trials[i];
            const double lambda = DimensionSpec(t.D).lambda();
            const ScaledValue c1 = gegenbauer_eval_scaled(t.l, lambda, t.x1);
            const ScaledValue c2 = gegenbauer_eval_scaled(t.l, lambda, t.x2);
            const bool positive = c1.phase == 0.0 && c2.phase == 0.0;
            const bool increasing = positive && c1.log_magnitude < c2.log_magnitude;
            return std::vector<Row>{{double(t.l), double(i), double(t.D), lambda, t.x1, t.x2, c1.log_magnitude,
                                     c2.log_magnitude, double(increasing), double(positive)}};
        },
        [&](std::size_t i) { return "trial " + std::to_string(i); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    report.verdicts.push_back(
        all_rows(report.table, "lemma1_monotonicity", "increasing", "trials with C(x1) < C(x2)"));
    report.verdicts.push_back(
        all_rows(report.table, "positive_above_one", "positive", "trials with C(x1), C(x2) > 0"));
    report.verdicts.push_back(error_verdict(out.errors));

    const std::size_t c1 = report.table.index("log_c1"), c2 = report.table.index("log_c2"),
                      cl = report.table.index("l");
    Series s{"log_gap_vs_l", "l", "ln_C(x2)-ln_C(x1)", {}};
    for (const Row& r : report.table.rows) {
        s.points.emplace_back(r[cl], r[c2] - r[c1]);
    }
    report.series.push_back(std::move(s));
}

inline bool strictly_interlace(const std::vector<double>& inner, const std::vector<double>& outer) {
    // outer has one more element; each inner zero lies strictly between consecutive outer zeros.
    if (outer.size() != inner.size() + 1) {
        return false;
    }
    for (std::size_t k = 0; k < inner.size(); ++k) {
        if (!(outer[k] < inner[k] && inner[k] < outer[k + 1])) {
            return false;
        }
    }
    return true;
}

inline void run_zero_spacing(const ScenarioConfig& config, ScanReport& report) {
    struct Task {
        int D;
        unsigned l;
    };
    std::vector<Task> tasks;
    for (const int D : config.dims) {
        for (const unsigned l : config.zero_spacing_degrees) {
            tasks.push_back({D, l});
        }
    }
    Collector out;
    out.table.columns = {"l", "D", "lambda", "max_deviation", "worst_nu", "min_scaled_gap", "max_scaled_gap",
                         "interlaced"};
    out.add(run_tasks(
        tasks.size(),
        [&](std::size_t i) {
            const Task& t = tasks[i];
            const double lambda = DimensionSpec(t.D).lambda();
            const std::vector<double> angles = gegenbauer_zero_angles(t.l, lambda);
            unsigned worst = 0;
            const double max_dev = max_abs_deviation(angles, t.l, &worst);
            double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0;
            for (std::size_t k = 1; k < angles.size(); ++k) {
                const double gap = t.l * (angles[k] - angles[k - 1]) / std::numbers::pi;
                min_gap = std::min(min_gap, gap);
                max_gap = std::max(max_gap, gap);
            }
            if (angles.size() < 2) {
                min_gap = max_gap = std::numeric_limits<double>::quiet_NaN();
            }
            const bool interlaced = strictly_interlace(angles, gegenbauer_zero_angles(t.l + 1, lambda));
            return std::vector<Row>{
                {double(t.l), double(t.D), lambda, max_dev, double(worst), min_gap, max_gap, double(interlaced)}};
        },
        [&](std::size_t i) { return "D=" + std::to_string(tasks[i].D) + " l=" + std::to_string(tasks[i].l); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    const std::size_t cl = table.index("l"), cd = table.index("max_deviation");

    for (const int D : config.dims) {
        const std::string suffix = "_D" + std::to_string(D);
        const auto rows = select(table, "D", D);
        double worst = 0.0;
        std::string values;
        for (const Row* r : rows) {
            worst = std::max(worst, (*r)[cd]);
            values += (values.empty() ? "" : ", ") + ("l=" + fmt((*r)[cl]) + ": " + fmt((*r)[cd]));
        }
        report.verdicts.push_back({"zero_spacing_bounded" + suffix, !rows.empty() && worst <= std::numbers::pi,
                                   "max |l theta_nu - nu pi| = " + fmt(worst) + " (limit pi); " + values});
        bool nonincreasing = rows.size() >= 2;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            if (!((*rows[k])[cd] <= 1.05 * (*rows[k - 1])[cd])) {
                nonincreasing = false;
            }
        }
        report.verdicts.push_back({"zero_spacing_nonincreasing" + suffix, nonincreasing,
                                   "max deviation must not grow with l beyond 5%: " + values});
        report.series.push_back(make_series(table, "max_deviation_vs_l" + suffix, "l", "max_deviation", "l",
                                            "max_abs_l_theta_minus_nu_pi", {}, {}, where(table, "D", D)));
    }
    report.verdicts.push_back(all_rows(table, "zero_interlacing", "interlaced",
                                       "degrees whose zeros strictly interlace those of degree l+1"));
    report.verdicts.push_back(error_verdict(out.errors));
}

inline void run_sigma_scaling(const ScenarioConfig& config, const std::vector<complex>& custom, ScanReport& report) {
    const auto grid = dimension_energy_grid(config);
    const BoundContext& ctx = config.ctx;
    Collector out;
    out.table.columns = {"s", "D", "lambda", "ln_s", "L", "sigma", "sigma_bound"};
    out.add(run_tasks(
        grid.size(),
        [&](std::size_t i) {
            const GridPoint& p = grid[i];
            const PartialWaveSet pw = model_at(config, custom, p.D, p.s);
            return std::vector<Row>{{p.s, double(p.D), pw.lambda(), ctx.log_s(p.s), double(pw.max_l()),
                                     total_cross_section(pw), sigma_bound_D(p.s, pw.dim(), ctx)}};
        },
        [&](std::size_t i) { return label(grid[i]); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    const std::size_t cs = table.index("s"), csig = table.index("sigma");

    for (const int D : config.dims) {
        const std::string name = "sigma_exponent_D" + std::to_string(D);
        std::vector<ScalingPoint> points;
        for (const Row* r : select(table, "D", D)) {
            points.push_back({(*r)[cs], (*r)[csig]});
        }
        try {
            const ScalingFit fit = scaling_exponent_fit(points, ctx.s_hat);
            const double target = D - 2.0;
            report.verdicts.push_back({name, std::abs(fit.exponent - target) <= 0.3,
                                       "fitted exponent " + fmt(fit.exponent) + " vs D-2 = " + fmt(target) +
                                           " (tolerance 0.3), rms residual " + fmt(fit.residual)});
        } catch (const std::exception& e) {
            report.verdicts.push_back({name, false, std::string("fit failed: ") + e.what()});
        }
    }
    std::size_t negative = 0;
    for (const Row& r : table.rows) {
        if (!(r[csig] >= 0.0)) {
            ++negative;
        }
    }
    report.verdicts.push_back({"sigma_nonnegative", !table.rows.empty() && negative == 0,
                               std::to_string(negative) + " negative cross sections"});
    report.verdicts.push_back(error_verdict(out.errors));

    const double s_hat = ctx.s_hat;
    auto lnln = [s_hat](double s) { return std::log(std::log(s / s_hat)); };
    auto ln = [](double v) { return std::log(v); };
    for (const int D : config.dims) {
        report.series.push_back(make_series(table, "sigma_vs_lnls_D" + std::to_string(D), "s", "sigma", "ln_ln_s",
                                            "ln_sigma_t", lnln, ln, where(table, "D", D)));
    }
    report.series.push_back(make_series(table, "sigma_vs_lnls", "s", "sigma", "ln_ln_s", "ln_sigma_t", lnln, ln,
                                        where(table, "D", config.dims.front())));
}

inline void run_bound_sweep(const ScenarioConfig& config, const std::vector<complex>& custom, ScanReport& report) {
    const auto grid = dimension_energy_grid(config);
    const BoundContext& ctx = config.ctx;
    Collector out;
    out.table.columns = {"s", "t", "D", "lambda", "ln_s", "L", "log_modulus", "log_bound", "s_power"};
    out.add(run_tasks(
        grid.size(),
        [&](std::size_t i) {
            const GridPoint& p = grid[i];
            const PartialWaveSet pw = model_at(config, custom, p.D, p.s);
            std::vector<Row> rows;
            for (const double fraction : config.bound_sweep_t_fractions) {
                const double t = fraction * ctx.T0;
                const double log_modulus = amplitude_scaled(pw, t).log_magnitude;
                const double log_bound = std::log(modulus_bound(p.s, t, pw.dim(), ctx));
                rows.push_back({p.s, t, double(p.D), pw.lambda(), ctx.log_s(p.s), double(pw.max_l()), log_modulus,
                                log_bound, modulus_bound_s_power(t, ctx)});
            }
            return rows;
        },
        [&](std::size_t i) { return label(grid[i]); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    const std::size_t cls = table.index("ln_s"), clm = table.index("log_modulus"), clb = table.index("log_bound"),
                      ct = table.index("t"), cd = table.index("D");

    // The bound drops o(1/ln s) terms, so it is only asserted from ln s >= 5.
    std::size_t checked = 0, violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();
    for (const Row& r : table.rows) {
        if (r[cls] >= 5.0) {
            ++checked;
            worst_margin = std::max(worst_margin, r[clm] - r[clb]);
            if (!(r[clm] <= r[clb])) {
                ++violations;
            }
        }
    }
    report.verdicts.push_back(
        {"modulus_bound_holds", violations == 0,
         checked == 0 ? std::string("no grid point with ln s >= 5")
                      : std::to_string(violations) + " of " + std::to_string(checked) +
                            " points with ln s >= 5 exceed the bound; max ln|F| - ln(bound) = " + fmt(worst_margin)});

    for (const double fraction : config.bound_sweep_t_fractions) {
        const double t = fraction * ctx.T0;
        const double limit = modulus_bound_s_power(t, ctx) + 0.1;
        std::vector<double> slopes;
        std::string listing;
        for (const int D : config.dims) {
            const std::string name = "modulus_slope_t" + fmt(fraction) + "_D" + std::to_string(D);
            std::vector<double> xs, ys;
            for (const Row& r : table.rows) {
                if (r[ct] == t && r[cd] == D) {
                    xs.push_back(r[cls]);
                    ys.push_back(r[clm]);
                }
            }
            try {
                const double slope = fit_line(xs, ys).slope;
                slopes.push_back(slope);
                listing += (listing.empty() ? "" : ", ") + ("D=" + std::to_string(D) + ": " + fmt(slope));
                report.verdicts.push_back({name, slope <= limit,
                                           "d ln|F| / d ln s = " + fmt(slope) + " (limit " + fmt(limit) + ")"});
            } catch (const std::exception& e) {
                report.verdicts.push_back({name, false, std::string("fit failed: ") + e.what()});
            }
            report.series.push_back(make_series(table, "log_modulus_vs_lns_D" + std::to_string(D) + "_t" + fmt(fraction),
                                                "ln_s", "log_modulus", "ln_s", "ln_abs_F", {}, {},
                                                [=](const Row& r) { return r[ct] == t && r[cd] == D; }));
        }
        const std::string name = "modulus_slope_lambda_independent_t" + fmt(fraction);
        if (slopes.size() < 2) {
            report.verdicts.push_back({name, slopes.size() == config.dims.size(),
                                       "fewer than two dimensions; nothing to compare"});
        } else {
            const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
            report.verdicts.push_back({name, slopes.size() == config.dims.size() && *hi - *lo <= 0.05,
                                       "slope spread " + fmt(*hi - *lo) + " (limit 0.05): " + listing});
        }
    }
    report.verdicts.push_back(error_verdict(out.errors));
}

inline double max_residual(const ZeroCensus& census) {
    double worst = 0.0;
    for (const LocatedZero& z : census.zeros) {
        worst = std::max(worst, z.residual);
    }
    return worst;
}

inline void run_zero_census(const ScenarioConfig& config, const std::vector<complex>& custom, ScanReport& report) {
    const auto grid = dimension_energy_grid(config);
    const BoundContext& ctx = config.ctx;
    Collector out;
    out.table.columns = {"s",          "D",           "lambda",        "ln_s",          "L",
                         "radius",     "count",       "complete",      "max_residual",  "jensen_rhs",
                         "min_modulus", "search_radius", "search_count", "search_complete", "r0_measured",
                         "r0_times_ln2s", "r0_bound",  "annulus_inner", "annulus_outer", "annulus_count"};
    out.add(run_tasks(
        grid.size(),
        [&](std::size_t i) {
            const GridPoint& p = grid[i];
            const PartialWaveSet pw = model_at(config, custom, p.D, p.s);
            const double log_s = ctx.log_s(p.s);
            const ZeroFreeRadius zf = zero_free_radius(p.s, ctx);
            const double radius = config.census_radius.value_or(zf.r0_max);
            const ZeroCensus census = zero_census(pw, radius, ctx);

            // Nearest zero, searched in a disk that scales like the predicted radius.
            auto f = [&pw](complex t) { return eval_amplitude(pw, t); };
            const double search_radius = config.census_search_coefficient / (log_s * log_s);
            CensusOptions search_options;
            search_options.compute_jensen = false;
            const ZeroCensus search = zero_census_of(f, search_radius, search_options);
            double r0 = std::numeric_limits<double>::quiet_NaN();
            for (const LocatedZero& z : search.zeros) {
                if (std::isnan(r0) || std::abs(z.location) < r0) {
                    r0 = std::abs(z.location);
                }
            }

            // Zeros between the zero-free radius and the annulus outer radius.
            const Contour inner{Circle{0.0, zf.annulus_inner}, 256};
            const Contour outer{Circle{0.0, zf.annulus_outer}, 256};
            const int annulus = winding_number(f, outer) - winding_number(f, inner);

            return std::vector<Row>{{p.s,
                                     double(p.D),
                                     pw.lambda(),
                                     log_s,
                                     double(pw.max_l()),
                                     radius,
                                     double(census.winding_count),
                                     double(census.complete()),
                                     max_residual(census),
                                     census.jensen_rhs,
                                     census.min_modulus_on_contour,
                                     search_radius,
                                     double(search.winding_count),
                                     double(search.complete()),
                                     r0,
                                     r0 * log_s * log_s,
                                     zf.r0_max,
                                     zf.annulus_inner,
                                     zf.annulus_outer,
                                     double(annulus)}};
        },
        [&](std::size_t i) { return label(grid[i]); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    const std::size_t ccount = table.index("count"), crhs = table.index("jensen_rhs"),
                      ccomplete = table.index("complete"), cscomplete = table.index("search_complete"),
                      cres = table.index("max_residual");

    std::size_t nonzero = 0, incomplete = 0, jensen_violations = 0;
    double worst_residual = 0.0;
    for (const Row& r : table.rows) {
        nonzero += r[ccount] != 0.0;
        incomplete += r[ccomplete] != 1.0 || r[cscomplete] != 1.0;
        jensen_violations += !(r[ccount] <= r[crhs]);
        worst_residual = std::max(worst_residual, r[cres]);
    }
    const std::string n = std::to_string(table.rows.size());
    report.verdicts.push_back({"zero_free_disk", !table.rows.empty() && nonzero == 0,
                               std::to_string(nonzero) + " of " + n + " grid points have zeros in the census disk"});
    report.verdicts.push_back({"census_complete", !table.rows.empty() && incomplete == 0,
                               std::to_string(incomplete) + " of " + n +
                                   " grid points left zeros unresolved; max residual " + fmt(worst_residual)});
    report.verdicts.push_back({"jensen_inequality", !table.rows.empty() && jensen_violations == 0,
                               std::to_string(jensen_violations) + " of " + n + " counts exceed the Jensen bound"});
    report.verdicts.push_back(error_verdict(out.errors));

    auto ln_s = [&ctx](double s) { return ctx.log_s(s); };
    for (const int D : config.dims) {
        report.series.push_back(make_series(table, "r0_vs_lns_D" + std::to_string(D), "s", "r0_measured", "ln_s",
                                            "measured_zero_free_radius", ln_s, {}, where(table, "D", D)));
    }
    report.series.push_back(make_series(table, "r0_vs_lns", "s", "r0_measured", "ln_s", "measured_zero_free_radius",
                                        ln_s, {}, where(table, "D", config.dims.front())));
    report.series.push_back(make_series(table, "r0_bound_vs_lns", "s", "r0_bound", "ln_s", "C2_over_ln2s", ln_s, {},
                                        where(table, "D", config.dims.front())));
}

inline void run_harnack(const ScenarioConfig& config, const std::vector<complex>& custom, ScanReport& report) {
    const auto grid = dimension_energy_grid(config);
    const BoundContext& ctx = config.ctx;
    const double R0 = config.harnack_R0_fraction * ctx.T0;
    const double s_min = config.s_grid.values().front();

    // C4 is calibrated once per dimension at the smallest s and reused at larger s.
    std::map<int, std::optional<double>> calibrated;
    const std::vector<double> ladder = default_C4_ladder();
    const auto calibrations = parallel_map<std::optional<double>>(config.dims.size(), [&](std::size_t k) {
        try {
            return calibrate_C4(model_at(config, custom, config.dims[k], s_min), ctx, ladder);
        } catch (const std::exception&) {
            return std::optional<double>();
        }
    });
    for (std::size_t k = 0; k < config.dims.size(); ++k) {
        calibrated[config.dims[k]] = calibrations[k];
    }

    Collector out;
    out.table.columns = {"s",           "r",           "D",          "lambda",       "ln_s",
                         "L",           "R0",          "disk_radius", "center_value", "lower",
                         "upper",       "min_ratio",   "max_ratio",   "samples",      "violations",
                         "calibrated_C4", "positivity_min_ratio", "sign_change_v", "sign_change_v_times_ln_s"};
    out.add(run_tasks(
        grid.size(),
        [&](std::size_t i) {
            const GridPoint& p = grid[i];
            const PartialWaveSet pw = model_at(config, custom, p.D, p.s);
            const double log_s = ctx.log_s(p.s);
            const std::optional<double> c4 = calibrated.at(p.D);
            double positivity = std::numeric_limits<double>::quiet_NaN();
            if (c4) {
                BoundContext calibrated_ctx = ctx;
                calibrated_ctx.C4 = *c4;
                positivity = domain_positivity(pw, calibrated_ctx, 8, 8).min_ratio;
            }
            const double v_max = 4.0 * std::numbers::pi * std::sqrt(R0) / log_s;
            const double v = first_sign_change_v(pw, R0, v_max).value_or(std::numeric_limits<double>::quiet_NaN());

            std::vector<Row> rows;
            for (std::size_t k = 0; k < config.harnack_r.size(); ++k) {
                const double r = config.harnack_r[k];
                SeededRng rng(derive_seed(config.seed, i * config.harnack_r.size() + k));
                const HarnackCheck check = harnack_check(pw, R0, r, ctx, config.harnack_samples, rng);
                rows.push_back({p.s,
                                r,
                                double(p.D),
                                pw.lambda(),
                                log_s,
                                double(pw.max_l()),
                                R0,
                                check.disk_radius,
                                check.center_value,
                                check.interval.lo,
                                check.interval.hi,
                                check.min_ratio,
                                check.max_ratio,
                                double(check.samples),
                                double(check.violations),
                                c4.value_or(std::numeric_limits<double>::quiet_NaN()),
                                positivity,
                                v,
                                v * log_s});
            }
            return rows;
        },
        [&](std::size_t i) { return label(grid[i]); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    const std::size_t cviol = table.index("violations"), csamp = table.index("samples"),
                      ccenter = table.index("center_value"), cpos = table.index("positivity_min_ratio"),
                      cv = table.index("sign_change_v"), cs = table.index("s"), cr = table.index("r"),
                      cminr = table.index("min_ratio"), cmaxr = table.index("max_ratio"),
                      cdim = table.index("D");

    double samples = 0.0, violations = 0.0;
    std::string ranges;
    for (const Row& r : table.rows) {
        samples += r[csamp];
        violations += r[cviol];
    }
    for (const double r : config.harnack_r) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Row* row : select(table, "r", r)) {
            lo = std::min(lo, (*row)[cminr]);
            hi = std::max(hi, (*row)[cmaxr]);
        }
        ranges += "; r=" + fmt(r) + ": Re A / A(R0) in [" + fmt(lo) + ", " + fmt(hi) + "], allowed (" +
                  fmt((1 - r) / (1 + r)) + ", " + fmt((1 + r) / (1 - r)) + ")";
    }
    report.verdicts.push_back({"harnack_bounds", !table.rows.empty() && violations == 0.0,
                               fmt(violations) + " of " + fmt(samples) + " samples outside the interval" + ranges});
    std::size_t nonpositive = 0;
    for (const Row& r : table.rows) {
        nonpositive += !(r[ccenter] > 0.0);
    }
    report.verdicts.push_back({"harnack_center_positive", !table.rows.empty() && nonpositive == 0,
                               std::to_string(nonpositive) + " nonpositive center values A(R0)"});

    for (const int D : config.dims) {
        const std::string suffix = "_D" + std::to_string(D);
        const std::optional<double> c4 = calibrated.at(D);
        double worst = std::numeric_limits<double>::infinity();
        for (const Row* r : select(table, "D", D)) {
            worst = std::min(worst, (*r)[cpos]);
        }
        report.verdicts.push_back(
            {"domain_positivity" + suffix, c4.has_value() && worst > 0.0,
             c4 ? "C4 calibrated to " + fmt(*c4) + " at s=" + fmt(s_min) + "; min Re A(u+iv)/A(u) = " + fmt(worst)
                : std::string("no C4 on the ladder makes the domain positive at the smallest s")});

        // One value per s (the rows repeat it for every r).
        std::vector<std::pair<double, double>> distance;
        for (const Row* r : select(table, "D", D)) {
            if ((*r)[cr] == config.harnack_r.front()) {
                distance.emplace_back((*r)[cs], (*r)[cv]);
            }
        }
        bool shrinking = distance.size() >= 2;
        std::string listing;
        for (std::size_t k = 0; k < distance.size(); ++k) {
            listing += (k ? ", " : "") + fmt(distance[k].second);
            if (!std::isfinite(distance[k].second) || (k > 0 && !(distance[k].second < distance[k - 1].second))) {
                shrinking = false;
            }
        }
        // The 1/ln s shrinkage follows from the phase of C_L at the gray-disk cutoff L.
        if (config.model.kind == ModelKind::gray_disk) {
            report.verdicts.push_back({"sign_change_distance_shrinks" + suffix, shrinking,
                                       "first v with Re A(R0 + iv) = 0 across the s grid: " + listing});
        }
        report.series.push_back(make_series(table, "sign_change_v_vs_lns" + suffix, "ln_s", "sign_change_v", "ln_s",
                                            "first_sign_change_v", {}, {}, [cdim, cr, D, r0 = config.harnack_r.front()](const Row& r) {
                                                return r[cdim] == D && r[cr] == r0;
                                            }));
    }
    report.verdicts.push_back(error_verdict(out.errors));

    for (const double r : config.harnack_r) {
        report.series.push_back(make_series(table, "min_ratio_vs_lns_r" + fmt(r), "ln_s", "min_ratio", "ln_s",
                                            "min_ReA_over_A_R0", {}, {}, [cdim, cr, r, D0 = config.dims.front()](const Row& row) {
                                                return row[cr] == r && row[cdim] == D0;
                                            }));
    }
}

inline void run_jensen(const ScenarioConfig& config, const std::vector<complex>& custom, ScanReport& report) {
    const auto grid = dimension_energy_grid(config);
    const BoundContext& ctx = config.ctx;
    Collector out;
    out.table.columns = {"s",     "D",           "lambda",     "radius",   "ln_s",        "L",
                         "count", "rhs_numeric", "rhs_closed_form", "complete", "max_residual", "holds"};
    out.add(run_tasks(
        grid.size(),
        [&](std::size_t i) {
            const GridPoint& p = grid[i];
            const PartialWaveSet pw = model_at(config, custom, p.D, p.s);
            std::vector<Row> rows;
            for (const double fraction : config.jensen_radius_fractions) {
                const double radius = fraction * ctx.T0;
                const ZeroCensus census = zero_census(pw, radius, ctx);
                const double closed_form = jensen_count_bound(radius, p.s, ctx, true);
                rows.push_back({p.s, double(p.D), pw.lambda(), radius, ctx.log_s(p.s), double(pw.max_l()),
                                double(census.winding_count), census.jensen_rhs, closed_form, double(census.complete()),
                                max_residual(census), double(census.winding_count <= census.jensen_rhs)});
            }
            return rows;
        },
        [&](std::size_t i) { return label(grid[i]); }));
    report.table = std::move(out.table);
    report.table.sort_rows();
    const Table& table = report.table;
    report.verdicts.push_back(all_rows(table, "jensen_inequality", "holds", "censuses with count <= Jensen bound"));
    report.verdicts.push_back(all_rows(table, "census_complete", "complete", "censuses with every zero refined"));
    report.verdicts.push_back(error_verdict(out.errors));

    const double largest = config.jensen_radius_fractions.back() * ctx.T0;
    const std::size_t cradius = table.index("radius"), cd = table.index("D");
    auto ln_s = [&ctx](double s) { return ctx.log_s(s); };
    for (const int D : config.dims) {
        report.series.push_back(make_series(table, "count_vs_lns_D" + std::to_string(D), "s", "count", "ln_s",
                                            "zeros_in_disk", ln_s, {},
                                            [=](const Row& r) { return r[cd] == D && r[cradius] == largest; }));
        report.series.push_back(make_series(table, "rhs_vs_lns_D" + std::to_string(D), "s", "rhs_numeric", "ln_s",
                                            "jensen_rhs", ln_s, {},
                                            [=](const Row& r) { return r[cd] == D && r[cradius] == largest; }));
    }
}

inline std::string describe(Scenario scenario) {
    switch (scenario) {
        case Scenario::orthogonality:
            return "Weighted integrals of C_m C_n (1-x^2)^(lambda-1/2) over [-1, 1] for m, n <= l_max: off-diagonal "
                   "values must vanish and diagonal values must equal the closed-form norm.";
        case Scenario::lemma1:
            return "Random (l, lambda, 1 < x1 < x2) draws: C_l^lambda is positive and strictly increasing above x = 1.";
        case Scenario::zero_spacing:
            return "Zeros theta_nu of C_l^lambda(cos theta): l theta_nu - nu pi stays bounded by pi and does not grow "
                   "with l; zeros of consecutive degrees interlace.";
        case Scenario::bound_sweep:
            return "ln|F(s, t)| of the model at real 0 < t < T0 against the modulus bound "
                   "A2 t^(-(lambda+1)/2) T0^(-lambda/2) s^(1+(N-1) sqrt(t/T0)) (ln s)^lambda; fitted d ln|F| / d ln s "
                   "against the lambda-independent s power.";
        case Scenario::sigma_scaling:
            return "Total cross section Im F(s, 0) / s of the model across the s grid, fitted as a power of ln(s/s_hat) "
                   "and compared with D - 2.";
        case Scenario::zero_census:
            return "Argument-principle census of zeros of F(s, t) in |t| < C2 / (ln s)^2 (expected empty), the Jensen "
                   "right-hand side at delta = e^-2, the measured nearest zero and the annulus count.";
        case Scenario::harnack:
            return "Re A(s, t) sampled in the disk |t - R0| < r pi sqrt(R0) / (2 C4 ln s) against the interval "
                   "((1-r)/(1+r), (1+r)/(1-r)) A(s, R0); positivity of Re A in |Im t| <= pi sqrt(Re t) / (2 C4 ln s) "
                   "with C4 calibrated at the smallest s; first sign change of Re A(R0 + iv).";
        case Scenario::jensen:
            return "Zero counts of F(s, t) in |t| < r for a grid of radii against the Jensen right-hand side "
                   "ln(max_{|t|=r/delta} |F| / |F(s, 0)|) / ln(1/delta) at delta = e^-2, with the closed-form count "
                   "bound for comparison.";
    }
    return {};
}

}  // namespace detail

inline std::vector<complex> load_custom_waves(const ScenarioConfig& config) {
    if (config.model.kind != ModelKind::custom_list) {
        return {};
    }
    const PartialWaveSet pw = read_partial_wave_set(config.model.waves_file);
    return {pw.waves().begin(), pw.waves().end()};
}

inline ScanReport run_scenario(const ScenarioConfig& config) {
    ScanReport report;
    report.scenario = config.scenario;
    report.description = detail::describe(config.scenario);
    report.config = config.resolved;
    report.seed = config.seed;
    report.timestamp = utc_timestamp();
    const std::vector<complex> custom = load_custom_waves(config);
    switch (config.scenario) {
        case Scenario::orthogonality:
            detail::run_orthogonality(config, report);
            break;
        case Scenario::lemma1:
            detail::run_lemma1(config, report);
            break;
        case Scenario::zero_spacing:
            detail::run_zero_spacing(config, report);
            break;
        case Scenario::bound_sweep:
            detail::run_bound_sweep(config, custom, report);
            break;
        case Scenario::sigma_scaling:
            detail::run_sigma_scaling(config, custom, report);
            break;
        case Scenario::zero_census:
            detail::run_zero_census(config, custom, report);
            break;
        case Scenario::harnack:
            detail::run_harnack(config, custom, report);
            break;
        case Scenario::jensen:
            detail::run_jensen(config, custom, report);
            break;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const ScanReport& report) {
    json config = json::object();
    for (const auto& [key, value] : report.config) {
        config[key] = value;
    }
    json rows = json::array();
    for (const Row& r : report.table.rows) {
        rows.push_back(r);
    }
    json verdicts = json::array();
    for (const Verdict& v : report.verdicts) {
        verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
    }
    json series = json::object();
    for (const Series& s : report.series) {
        json points = json::array();
        for (const auto& [x, y] : s.points) {
            points.push_back({x, y});
        }
        series[s.name] = {{"x", s.x_label}, {"y", s.y_label}, {"points", std::move(points)}};
    }
    return {{"scenario", to_string(report.scenario)},
            {"description", report.description},
            {"config", std::move(config)},
            {"columns", report.table.columns},
            {"rows", std::move(rows)},
            {"verdicts", std::move(verdicts)},
            {"pass", report.pass()},
            {"series", std::move(series)},
            {"provenance", {{"version", kVersion}, {"timestamp", report.timestamp}, {"seed", report.seed}}}};
}

inline std::string rows_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += '\n';
    for (const Row& r : table.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            out += (c ? "," : "") + format_double(r[c]);
        }
        out += '\n';
    }
    return out;
}

inline std::string series_csv(const std::string& x_label, const std::string& y_label,
                              const std::vector<std::pair<double, double>>& points) {
    std::string out = x_label + "," + y_label + "\n";
    for (const auto& [x, y] : points) {
        out += format_double(x) + "," + format_double(y) + "\n";
    }
    return out;
}

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw io_error("cannot write " + path.string());
    }
}

// report.json, rows.csv and <series>.csv in `dir`.
inline void write_report(const ScanReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw io_error("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(dir / "rows.csv", rows_csv(report.table));
    for (const Series& s : report.series) {
        write_text(dir / (s.name + ".csv"), series_csv(s.x_label, s.y_label, s.points));
    }
}

inline json read_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw io_error("cannot parse " + path.string() + ": " + e.what());
    }
}

// Writes the named series of a serialized report as two-column CSV.
inline std::filesystem::path emit_plot_series(const json& report, const std::string& name,
                                              const std::filesystem::path& out) {
    const json& series = report.at("series");
    if (!series.contains(name)) {
        std::string available;
        for (const auto& [key, value] : series.items()) {
            available += (available.empty() ? "" : ", ") + key;
        }
        throw domain_error("unknown series '" + name + "'; available: " + (available.empty() ? "none" : available));
    }
    const json& s = series.at(name);
    std::vector<std::pair<double, double>> points;
    for (const json& p : s.at("points")) {
        points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    write_text(out, series_csv(s.at("x").get<std::string>(), s.at("y").get<std::string>(), points));
    return out;
}

}  // namespace hdamp
