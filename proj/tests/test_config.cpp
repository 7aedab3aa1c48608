#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdamp/config.hpp"
#include "hdamp/io.hpp"
#include "hdamp/parallel.hpp"
#include "hdamp/random.hpp"

using namespace hdamp;

namespace {

KeyValues parse(const std::string& text) {
    std::istringstream in(text);
    return parse_key_values(in);
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hdamp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(KeyValues, ParsesCommentsAndWhitespace) {
    const KeyValues kv = parse("# header\n  ctx.N = 2.5  \n\nscenario=jensen # trailing\ndim.D=4,5\n");
    EXPECT_EQ(kv.at("ctx.N"), "2.5");
    EXPECT_EQ(kv.at("scenario"), "jensen");
    EXPECT_EQ(kv.at("dim.D"), "4,5");
    EXPECT_EQ(kv.size(), 3u);
}

TEST(KeyValues, ReportsLineOfBadEntry) {
    try {
        parse("ctx.N=2\nthis line has no equals\n");
        FAIL() << "expected config_error";
    } catch (const config_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Values, Reals) {
    EXPECT_EQ(parse_real("k", "2.5"), 2.5);
    EXPECT_NEAR(parse_real("k", "e^4"), std::exp(4.0), 1e-12 * std::exp(4.0));
    EXPECT_EQ(parse_real("k", "1e-3"), 1e-3);
    EXPECT_THROW(parse_real("k", "abc"), config_error);
    EXPECT_THROW(parse_real("k", "2.5x"), config_error);
    EXPECT_THROW(parse_unsigned("k", "-1"), config_error);
    EXPECT_EQ(parse_unsigned("k", "42"), 42u);
    EXPECT_EQ(parse_real_list("k", "0.1, 0.2,0.3"), (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(Values, ScenarioNames) {
    for (const auto& [scenario, name] : kScenarioNames) {
        EXPECT_EQ(parse_scenario(name), scenario);
        EXPECT_EQ(to_string(scenario), name);
    }
    EXPECT_THROW(parse_scenario("nope"), config_error);
}

TEST(SGrid, LogAndLinear) {
    const SGrid log_grid{std::exp(2.0), std::exp(10.0), 9, Spacing::log};
    const auto v = log_grid.values();
    ASSERT_EQ(v.size(), 9u);
    for (unsigned k = 0; k < 9; ++k) {
        EXPECT_NEAR(std::log(v[k]), 2.0 + k, 1e-12);
    }
    const SGrid lin{10.0, 20.0, 3, Spacing::linear};
    EXPECT_EQ(lin.values(), (std::vector<double>{10.0, 15.0, 20.0}));
    const SGrid single{5.0, 5.0, 1, Spacing::log};
    EXPECT_EQ(single.values(), std::vector<double>{5.0});
}

TEST(Resolve, DefaultsPerScenario) {
    const ScenarioConfig c = resolve_config({{"scenario", "sigma-scaling"}});
    EXPECT_EQ(c.scenario, Scenario::sigma_scaling);
    EXPECT_EQ(c.dims, (std::vector<int>{4, 5, 6}));
    EXPECT_EQ(c.s_grid.points, 9u);
    EXPECT_NEAR(c.s_grid.start, std::exp(2.0), 1e-12);
    EXPECT_EQ(c.ctx.N, 2.0);
    EXPECT_EQ(c.model.kind, ModelKind::gray_disk);
    EXPECT_FALSE(c.model.cutoff.has_value());
    EXPECT_EQ(c.resolved.at("scenario"), "sigma-scaling");

    const ScenarioConfig census = resolve_config({{"scenario", "zero-census"}});
    EXPECT_NEAR(census.s_grid.start, std::exp(4.0), 1e-9);
    EXPECT_FALSE(census.census_radius.has_value());
}

TEST(Resolve, Overrides) {
    const ScenarioConfig c = resolve_config({{"scenario", "harnack"},
                                             {"ctx.N", "3"},
                                             {"dim.D", "6"},
                                             {"model.kind", "exponential_tail"},
                                             {"model.g", "0.5"},
                                             {"model.L_eff", "12"},
                                             {"harnack.r", "0.2,0.4"}});
    EXPECT_EQ(c.ctx.N, 3.0);
    EXPECT_EQ(c.dims, std::vector<int>{6});
    EXPECT_EQ(c.model.kind, ModelKind::exponential_tail);
    EXPECT_EQ(c.model.amplitude, 0.5);
    EXPECT_EQ(c.model.decay_scale, 12.0);
    EXPECT_EQ(c.harnack_r, (std::vector<double>{0.2, 0.4}));
}

TEST(Resolve, ErrorsNameTheKey) {
    auto key_of = [](const KeyValues& kv) -> std::string {
        try {
            resolve_config(kv);
        } catch (const config_error& e) {
            return e.what();
        }
        return "";
    };
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"ctx.bogus", "1"}}).find("ctx.bogus"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"ctx.T0", "-1"}}).find("ctx.T0"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"dim.D", "3"}}).find("dim.D"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"model.g", "1.5"}}).find("model.g"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"model.kind", "custom_list"}}).find("model.waves_file"),
              std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"s_grid.start", "0.5"}}).find("s_grid.start"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"harnack.r", "1.0"}}).find("harnack.r"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "jensen"}, {"census.radius", "2"}}).find("census.radius"), std::string::npos);
    EXPECT_NE(key_of({}).find("scenario"), std::string::npos);
    EXPECT_NE(key_of({{"scenario", "unknown"}}).find("scenario"), std::string::npos);
}

TEST(FormatDouble, RoundTrips) {
    for (const double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, std::exp(10.0)}) {
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(PartialWaveJson, RoundTrip) {
    const PartialWaveSet pw(DimensionSpec(6), 123.5, {complex(0.1, 0.5), complex(0.0, 1.0 / 3.0)});
    const PartialWaveSet back = partial_wave_set_from_json(to_json(pw));
    EXPECT_EQ(back.dim(), pw.dim());
    EXPECT_EQ(back.s(), pw.s());
    ASSERT_EQ(back.waves().size(), 2u);
    EXPECT_EQ(back.waves()[1], pw.waves()[1]);

    const auto dir = scratch_dir("waves");
    {
        std::ofstream out(dir / "waves.json");
        out << to_json(pw).dump();
    }
    EXPECT_EQ(read_partial_wave_set((dir / "waves.json").string()).waves()[0], pw.waves()[0]);
    EXPECT_THROW(read_partial_wave_set((dir / "missing.json").string()), hdamp::domain_error);
    EXPECT_THROW(partial_wave_set_from_json(json{{"D", 5}, {"s", 10.0}, {"waves", {{1.0}}}}), hdamp::domain_error);
    EXPECT_THROW(partial_wave_set_from_json(json{{"D", 5}}), hdamp::domain_error);
}

TEST(Random, FixedSequence) {
    // The 10000th output of mt19937_64 with the default seed is fixed by the C++ standard.
    SeededRng rng(5489u);
    for (int i = 0; i < 9999; ++i) {
        rng.next();
    }
    EXPECT_EQ(rng.next(), 9981545732273789042ull);
}

TEST(Random, UniformRanges) {
    SeededRng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const double v = rng.uniform(-2.0, 3.0);
        EXPECT_GE(v, -2.0);
        EXPECT_LT(v, 3.0);
        const auto k = rng.uniform_int(3, 7);
        EXPECT_GE(k, 3u);
        EXPECT_LE(k, 7u);
    }
}

TEST(Random, DerivedSeedsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seen.insert(derive_seed(1, i));
    }
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
    EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
}

TEST(Parallel, OrderIndependentOfThreads) {
    auto square = [](std::size_t i) { return static_cast<double>(i * i); };
    ::setenv("HDAMP_THREADS", "1", 1);
    const auto serial = parallel_map<double>(257, square);
    ::setenv("HDAMP_THREADS", "4", 1);
    const auto threaded = parallel_map<double>(257, square);
    ::unsetenv("HDAMP_THREADS");
    EXPECT_EQ(serial, threaded);
    EXPECT_EQ(threaded[16], 256.0);
}

TEST(Parallel, ThreadBudget) {
    ::setenv("HDAMP_THREADS", "3", 1);
    EXPECT_EQ(thread_budget(), 3u);
    ::setenv("HDAMP_THREADS", "0", 1);
    EXPECT_GE(thread_budget(), 1u);
    ::setenv("HDAMP_THREADS", "junk", 1);
    EXPECT_GE(thread_budget(), 1u);
    ::unsetenv("HDAMP_THREADS");
}

TEST(Parallel, LowestFailingIndexIsRethrown) {
    ::setenv("HDAMP_THREADS", "4", 1);
    try {
        parallel_map<int>(100, [](std::size_t i) -> int {
            if (i == 13 || i == 77) {
                throw std::runtime_error("task " + std::to_string(i));
            }
            return 0;
        });
        FAIL() << "expected exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "task 13");
    }
    ::unsetenv("HDAMP_THREADS");
}
