#pragma once

// JSON and CSV encodings of the library's data types.

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "hdamp/amplitude.hpp"
#include "hdamp/errors.hpp"
#include "hdamp/zeroscan.hpp"

namespace hdamp {

using json = nlohmann::json;

// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

// {"D": int, "s": float, "waves": [[re, im], ...]}
inline json to_json(const PartialWaveSet& pw) {
    json waves = json::array();
    for (const complex& f : pw.waves()) {
        waves.push_back({f.real(), f.imag()});
    }
    return {{"D", pw.dim().D()}, {"s", pw.s()}, {"waves", std::move(waves)}};
}

inline PartialWaveSet partial_wave_set_from_json(const json& j) {
    try {
        const int D = j.at("D").get<int>();
        const double s = j.at("s").get<double>();
        std::vector<complex> waves;
        for (const json& w : j.at("waves")) {
            if (!w.is_array() || w.size() != 2) {
                throw domain_error("each wave must be a [re, im] pair");
            }
            waves.emplace_back(w[0].get<double>(), w[1].get<double>());
        }
        return PartialWaveSet(DimensionSpec(D), s, std::move(waves));
    } catch (const json::exception& e) {
        throw domain_error(std::string("malformed partial-wave JSON: ") + e.what());
    }
}

inline PartialWaveSet read_partial_wave_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw domain_error("cannot open partial-wave file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw domain_error("cannot parse " + path + ": " + e.what());
    }
    return partial_wave_set_from_json(j);
}

// Zeros as [re, im, residual] triples.
inline json to_json(const ZeroCensus& census) {
    json zeros = json::array();
    for (const LocatedZero& z : census.zeros) {
        zeros.push_back({z.location.real(), z.location.imag(), z.residual});
    }
    json unresolved = json::array();
    for (const UnresolvedBox& b : census.unresolved) {
        unresolved.push_back({{"lower_left", {b.box.lower_left.real(), b.box.lower_left.imag()}},
                              {"upper_right", {b.box.upper_right.real(), b.box.upper_right.imag()}},
                              {"count", b.count},
                              {"reason", b.reason}});
    }
    return {{"disk_radius", census.disk_radius},
            {"winding_count", census.winding_count},
            {"zeros", std::move(zeros)},
            {"jensen_rhs", census.jensen_rhs},
            {"min_modulus_on_contour", census.min_modulus_on_contour},
            {"unresolved", std::move(unresolved)}};
}

}  // namespace hdamp
