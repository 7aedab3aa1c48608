#pragma once

// Scenario configuration: flat key=value text with dotted keys.  Every key has a
// default (some depend on the scenario); the resolved map is echoed into reports.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdamp/bounds.hpp"
#include "hdamp/errors.hpp"
#include "hdamp/io.hpp"

namespace hdamp {

enum class Scenario { orthogonality, lemma1, zero_spacing, bound_sweep, sigma_scaling, zero_census, harnack, jensen };

inline constexpr std::array<std::pair<Scenario, std::string_view>, 8> kScenarioNames = {{
    {Scenario::orthogonality, "orthogonality"},
    {Scenario::lemma1, "lemma1"},
    {Scenario::zero_spacing, "zero-spacing"},
    {Scenario::bound_sweep, "bound-sweep"},
    {Scenario::sigma_scaling, "sigma-scaling"},
    {Scenario::zero_census, "zero-census"},
    {Scenario::harnack, "harnack"},
    {Scenario::jensen, "jensen"},
}};

inline std::string to_string(Scenario s) {
    for (const auto& [value, name] : kScenarioNames) {
        if (value == s) {
            return std::string(name);
        }
    }
    return "unknown";
}

inline Scenario parse_scenario(std::string_view text) {
    for (const auto& [value, name] : kScenarioNames) {
        if (name == text) {
            return value;
        }
    }
    std::string names;
    for (const auto& [value, name] : kScenarioNames) {
        names += names.empty() ? "" : ", ";
        names += name;
    }
    throw config_error("scenario", "unknown scenario '" + std::string(text) + "' (expected one of " + names + ")");
}

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(std::string_view text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return std::string(text.substr(begin, end - begin + 1));
}

// Lines of key=value.  '#' at the start of a line or after whitespace begins a comment.
inline KeyValues parse_key_values(std::istream& in) {
    KeyValues values;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.resize(i);
                break;
            }
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(number), "expected key=value");
        }
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        if (key.empty()) {
            throw config_error("line " + std::to_string(number), "empty key");
        }
        values[key] = trim(std::string_view(stripped).substr(eq + 1));
    }
    return values;
}

// Accepts decimal literals and "e^X" for exp(X).
inline double parse_real(const std::string& key, const std::string& text) {
    std::string_view body = text;
    const bool exponential = body.starts_with("e^");
    if (exponential) {
        body.remove_prefix(2);
    }
    double value = 0.0;
    const auto result = std::from_chars(body.data(), body.data() + body.size(), value);
    if (result.ec != std::errc() || result.ptr != body.data() + body.size() || body.empty()) {
        throw config_error(key, "expected a number, got '" + text + "'");
    }
    return exponential ? std::exp(value) : value;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size() || text.empty()) {
        throw config_error(key, "expected a nonnegative integer, got '" + text + "'");
    }
    return value;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        items.push_back(trim(item));
    }
    return items;
}

inline std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    for (const std::string& item : split_list(text)) {
        values.push_back(parse_real(key, item));
    }
    if (values.empty()) {
        throw config_error(key, "expected a comma-separated list");
    }
    return values;
}

enum class Spacing { log, linear };

struct SGrid {
    double start = 0.0;
    double stop = 0.0;
    unsigned points = 1;
    Spacing spacing = Spacing::log;

    std::vector<double> values() const {
        std::vector<double> out;
        for (unsigned k = 0; k < points; ++k) {
            const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
            if (k == 0 || k + 1 == points) {
                out.push_back(k == 0 ? start : stop);
            } else if (spacing == Spacing::log) {
                out.push_back(std::exp(std::log(start) + f * (std::log(stop) - std::log(start))));
            } else {
                out.push_back(start + f * (stop - start));
            }
        }
        return out;
    }
};

enum class ModelKind { gray_disk, exponential_tail, custom_list };

struct ModelConfig {
    ModelKind kind = ModelKind::gray_disk;
    std::optional<unsigned> cutoff;      // gray disk L; truncation order when absent
    double amplitude = 1.0;              // exponential tail g
    std::optional<double> decay_scale;   // sqrt(s) / (2 sqrt(T0)) when absent
    std::optional<unsigned> max_l;
    std::string waves_file;
};

struct ScenarioConfig {
    Scenario scenario = Scenario::sigma_scaling;
    std::vector<int> dims;
    BoundContext ctx;
    SGrid s_grid;
    ModelConfig model;
    std::uint64_t seed = 1;

    unsigned orthogonality_l_max = 12;
    unsigned lemma1_trials = 10000;
    unsigned lemma1_l_max = 200;
    double lemma1_x_span = 10.0;
    std::vector<unsigned> zero_spacing_degrees;
    std::vector<double> bound_sweep_t_fractions;
    std::optional<double> census_radius;  // zero-free radius bound when absent
    double census_search_coefficient = 40.0;
    std::vector<double> jensen_radius_fractions;
    double harnack_R0_fraction = 0.5;
    std::vector<double> harnack_r;
    unsigned harnack_samples = 1000;

    // Every key with its resolved text, defaults included.
    KeyValues resolved;
};

// Defaults for a scenario, as text, in the same form a config file would use.
inline KeyValues default_key_values(Scenario scenario) {
    KeyValues d = {
        {"scenario", to_string(scenario)},
        {"dim.D", "5"},
        {"ctx.N", "2"},
        {"ctx.T0", "1"},
        {"ctx.s_hat", "1"},
        {"ctx.C0", "1"},
        {"ctx.C4", "1"},
        {"ctx.C3_over_C2", "4"},
        {"ctx.t0_4d", format_double(4.0 * kPionMass * kPionMass)},
        {"ctx.eps", "0"},
        {"ctx.delta1_frac", "0.001"},
        {"s_grid.start", "e^2"},
        {"s_grid.stop", "e^10"},
        {"s_grid.points", "9"},
        {"s_grid.spacing", "log"},
        {"model.kind", "gray_disk"},
        {"model.L", "auto"},
        {"model.g", "1"},
        {"model.L_eff", "auto"},
        {"model.max_l", "auto"},
        {"model.waves_file", ""},
        {"seed", "1"},
        {"orthogonality.l_max", "12"},
        {"lemma1.trials", "10000"},
        {"lemma1.l_max", "200"},
        {"lemma1.x_span", "10"},
        {"zero_spacing.l", "10,50,200"},
        {"bound_sweep.t_fracs", "0.04,0.16,0.36"},
        {"census.radius", "zero_free"},
        {"census.search_coeff", "40"},
        {"jensen.radius_fracs", "0.1,0.3,0.5,0.7,0.9"},
        {"harnack.R0_frac", "0.5"},
        {"harnack.r", "0.1,0.3,0.5"},
        {"harnack.samples", "1000"},
    };
    switch (scenario) {
        case Scenario::orthogonality:
        case Scenario::lemma1:
            d["dim.D"] = "4,5,6,7";
            break;
        case Scenario::zero_spacing:
            d["dim.D"] = "4,5,7";
            break;
        case Scenario::sigma_scaling:
            d["dim.D"] = "4,5,6";
            break;
        case Scenario::bound_sweep:
            d["dim.D"] = "4,5,6";
            d["s_grid.start"] = "e^6";
            break;
        case Scenario::zero_census:
            d["s_grid.start"] = "e^4";
            d["s_grid.points"] = "7";
            break;
        case Scenario::harnack:
        case Scenario::jensen:
            d["s_grid.start"] = "e^4";
            d["s_grid.points"] = "4";
            break;
    }
    return d;
}

inline ScenarioConfig resolve_config(const KeyValues& given) {
    const auto scenario_it = given.find("scenario");
    if (scenario_it == given.end()) {
        throw config_error("scenario", "missing (pass --scenario or set scenario= in the config file)");
    }
    ScenarioConfig config;
    config.scenario = parse_scenario(scenario_it->second);

    KeyValues kv = default_key_values(config.scenario);
    for (const auto& [key, value] : given) {
        if (!kv.contains(key)) {
            throw config_error(key, "unknown configuration key");
        }
        kv[key] = value;
    }
    config.resolved = kv;

    auto real = [&](const std::string& key) { return parse_real(key, kv.at(key)); };
    auto count = [&](const std::string& key) { return parse_unsigned(key, kv.at(key)); };
    auto optional_real = [&](const std::string& key) -> std::optional<double> {
        return kv.at(key) == "auto" ? std::nullopt : std::optional<double>(real(key));
    };
    auto optional_count = [&](const std::string& key) -> std::optional<unsigned> {
        return kv.at(key) == "auto" ? std::nullopt : std::optional<unsigned>(static_cast<unsigned>(count(key)));
    };

    for (const std::string& item : split_list(kv.at("dim.D"))) {
        const auto D = static_cast<int>(parse_unsigned("dim.D", item));
        if (D < 4) {
            throw config_error("dim.D", "dimension must be >= 4");
        }
        config.dims.push_back(D);
    }
    if (config.dims.empty()) {
        throw config_error("dim.D", "at least one dimension is required");
    }

    BoundContext& ctx = config.ctx;
    ctx.N = real("ctx.N");
    ctx.T0 = real("ctx.T0");
    ctx.s_hat = real("ctx.s_hat");
    ctx.C0 = real("ctx.C0");
    ctx.C4 = real("ctx.C4");
    ctx.C3_over_C2 = real("ctx.C3_over_C2");
    ctx.t0_4d = real("ctx.t0_4d");
    ctx.eps = real("ctx.eps");
    ctx.delta1_frac = real("ctx.delta1_frac");
    ctx.validate();

    config.s_grid.start = real("s_grid.start");
    config.s_grid.stop = real("s_grid.stop");
    config.s_grid.points = static_cast<unsigned>(count("s_grid.points"));
    const std::string& spacing = kv.at("s_grid.spacing");
    if (spacing == "log") {
        config.s_grid.spacing = Spacing::log;
    } else if (spacing == "linear") {
        config.s_grid.spacing = Spacing::linear;
    } else {
        throw config_error("s_grid.spacing", "expected 'log' or 'linear'");
    }
    if (config.s_grid.points < 1) {
        throw config_error("s_grid.points", "must be >= 1");
    }
    if (!(config.s_grid.start > ctx.s_hat)) {
        throw config_error("s_grid.start", "must exceed ctx.s_hat");
    }
    if (!(config.s_grid.stop >= config.s_grid.start)) {
        throw config_error("s_grid.stop", "must be >= s_grid.start");
    }

    const std::string& kind = kv.at("model.kind");
    if (kind == "gray_disk") {
        config.model.kind = ModelKind::gray_disk;
    } else if (kind == "exponential_tail") {
        config.model.kind = ModelKind::exponential_tail;
    } else if (kind == "custom_list") {
        config.model.kind = ModelKind::custom_list;
    } else {
        throw config_error("model.kind", "expected gray_disk, exponential_tail or custom_list");
    }
    config.model.cutoff = optional_count("model.L");
    config.model.amplitude = real("model.g");
    if (!(config.model.amplitude > 0.0 && config.model.amplitude <= 1.0)) {
        throw config_error("model.g", "must lie in (0, 1] to respect unitarity");
    }
    config.model.decay_scale = optional_real("model.L_eff");
    config.model.max_l = optional_count("model.max_l");
    config.model.waves_file = kv.at("model.waves_file");
    if (config.model.kind == ModelKind::custom_list && config.model.waves_file.empty()) {
        throw config_error("model.waves_file", "required for model.kind=custom_list");
    }

    config.seed = count("seed");
    config.orthogonality_l_max = static_cast<unsigned>(count("orthogonality.l_max"));
    if (config.orthogonality_l_max > kOrthogonalityMaxDegree) {
        throw config_error("orthogonality.l_max", "must be <= 64");
    }
    config.lemma1_trials = static_cast<unsigned>(count("lemma1.trials"));
    config.lemma1_l_max = static_cast<unsigned>(count("lemma1.l_max"));
    if (config.lemma1_l_max < 1) {
        throw config_error("lemma1.l_max", "must be >= 1");
    }
    config.lemma1_x_span = real("lemma1.x_span");
    for (const std::string& item : split_list(kv.at("zero_spacing.l"))) {
        const auto l = static_cast<unsigned>(parse_unsigned("zero_spacing.l", item));
        if (l < 1) {
            throw config_error("zero_spacing.l", "degrees must be >= 1");
        }
        config.zero_spacing_degrees.push_back(l);
    }
    config.bound_sweep_t_fractions = parse_real_list("bound_sweep.t_fracs", kv.at("bound_sweep.t_fracs"));
    for (const double f : config.bound_sweep_t_fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw config_error("bound_sweep.t_fracs", "fractions of T0 must lie in (0, 1)");
        }
    }
    config.census_radius = kv.at("census.radius") == "zero_free" ? std::nullopt
                                                                  : std::optional<double>(real("census.radius"));
    if (config.census_radius && !(*config.census_radius > 0.0 && *config.census_radius < ctx.T0)) {
        throw config_error("census.radius", "must lie in (0, T0)");
    }
    config.census_search_coefficient = real("census.search_coeff");
    config.jensen_radius_fractions = parse_real_list("jensen.radius_fracs", kv.at("jensen.radius_fracs"));
    for (const double f : config.jensen_radius_fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw config_error("jensen.radius_fracs", "fractions of T0 must lie in (0, 1)");
        }
    }
    config.harnack_R0_fraction = real("harnack.R0_frac");
    if (!(config.harnack_R0_fraction > 0.0 && config.harnack_R0_fraction < 1.0 - ctx.delta1_frac)) {
        throw config_error("harnack.R0_frac", "must lie in (0, 1 - delta1_frac)");
    }
    config.harnack_r = parse_real_list("harnack.r", kv.at("harnack.r"));
    for (const double r : config.harnack_r) {
        if (!(r > 0.0 && r < 1.0)) {
            throw config_error("harnack.r", "values must lie in (0, 1)");
        }
    }
    config.harnack_samples = static_cast<unsigned>(count("harnack.samples"));
    return config;
}

}  // namespace hdamp
