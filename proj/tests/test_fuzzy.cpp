#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "domectl/config.hpp"
#include "domectl/fuzzy.hpp"
#include "support/oracles.hpp"

using namespace domectl;
using fuzzy::MembershipFunction;

TEST_CASE("triangular membership hits its breakpoints exactly") {
    const MembershipFunction mf = MembershipFunction::triangular(25, 50, 75);
    CHECK(mf(50.0) == 1.0);
    CHECK(mf(80.0) == 0.0);
    CHECK(mf(25.0) == 0.0);
    CHECK(mf(75.0) == 0.0);
    CHECK(mf(72.0) == doctest::Approx(0.12).epsilon(1e-15)); // (75-72)/(75-50)
    CHECK(mf(37.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("shoulder triangles peak at their flat edge") {
    const MembershipFunction left = MembershipFunction::triangular(0, 0, 30);
    CHECK(left(0.0) == 1.0);
    CHECK(left(15.0) == 0.5);
    CHECK(left(30.0) == 0.0);
    const MembershipFunction right = MembershipFunction::triangular(70, 100, 100);
    CHECK(right(100.0) == 1.0);
    CHECK(right(70.0) == 0.0);
    CHECK(right(85.0) == 0.5);
}

TEST_CASE("trapezoidal membership") {
    const MembershipFunction mf = MembershipFunction::trapezoidal(0, 10, 20, 40);
    CHECK(mf(10.0) == 1.0);
    CHECK(mf(20.0) == 1.0);
    CHECK(mf(15.0) == 1.0);
    CHECK(mf(5.0) == 0.5);
    CHECK(mf(30.0) == 0.5);
    CHECK(mf(45.0) == 0.0);
}

TEST_CASE("singleton membership") {
    const MembershipFunction mf = MembershipFunction::singleton(0.0);
    CHECK(mf(0.0) == 1.0);
    CHECK(mf(0.0001) == 0.0);
    CHECK(mf.is_singleton());
}

TEST_CASE("malformed shapes are construction-time config errors") {
    CHECK_THROWS_AS(MembershipFunction::triangular(50, 25, 75), ConfigError);
    CHECK_THROWS_AS(MembershipFunction::triangular(10, 10, 10), ConfigError);
    CHECK_THROWS_AS(MembershipFunction::trapezoidal(0, 30, 20, 40), ConfigError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(MembershipFunction::triangular(0, nan, 1), ConfigError);
}

TEST_CASE("membership stays in [0,1] for 1e5 random probes per shape") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-500.0, 500.0);
    const MembershipFunction shapes[] = {MembershipFunction::triangular(25, 50, 75),
                                         MembershipFunction::trapezoidal(0, 10, 20, 40),
                                         MembershipFunction::singleton(3.0)};
    for (const MembershipFunction& mf : shapes) {
        for (int i = 0; i < 100000; ++i) {
            const double mu = mf(dist(rng));
            REQUIRE(mu >= 0.0);
            REQUIRE(mu <= 1.0);
        }
    }
}

TEST_CASE("membership is piecewise linear within segments") {
    std::mt19937_64 rng(11);
    const MembershipFunction mf = MembershipFunction::triangular(25, 50, 75);
    // Both probes inside the same linear segment -> midpoint interpolates.
    const std::pair<double, double> segments[] = {{25.0, 50.0}, {50.0, 75.0}};
    for (auto [lo, hi] : segments) {
        std::uniform_real_distribution<double> dist(lo, hi);
        for (int i = 0; i < 2000; ++i) {
            const double x1 = dist(rng), x2 = dist(rng);
            const double mid = mf((x1 + x2) / 2.0);
            const double avg = (mf(x1) + mf(x2)) / 2.0;
            REQUIRE(std::abs(mid - avg) <= 1e-12);
        }
    }
}

TEST_CASE("fuzzify clamps and reports every term") {
    const fuzzy::InferenceEngine engine = config::default_engine();
    const fuzzy::LinguisticVariable& crowd = engine.input("crowd");

    auto at0 = crowd.fuzzify(0.0);
    CHECK(at0.at("NoCrowd") == 1.0);
    CHECK(at0.at("Medium") == 0.0);
    CHECK(at0.at("Crowd") == 0.0);

    auto at72 = crowd.fuzzify(72.0);
    CHECK(at72.at("NoCrowd") == 0.0);
    CHECK(at72.at("Medium") == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(at72.at("Crowd") == doctest::Approx(2.0 / 30.0).epsilon(1e-15));

    const fuzzy::LinguisticVariable& weather = engine.input("weather");
    auto at30 = weather.fuzzify(30.0);
    CHECK(at30.at("Rain") == 0.0);
    CHECK(at30.at("Outlook") > 0.0);

    // Clamping: far out-of-axis values behave like the axis edge.
    auto big = crowd.fuzzify(1e9);
    CHECK(big.at("Crowd") == 1.0);
    auto neg = crowd.fuzzify(-5.0);
    CHECK(neg.at("NoCrowd") == 1.0);
}

TEST_CASE("variable construction validates labels and supports") {
    using fuzzy::LinguisticVariable;
    using fuzzy::Term;
    using fuzzy::UniverseAxis;
    const UniverseAxis axis{"v", 0.0, 100.0, 1.0};
    CHECK_THROWS_AS(LinguisticVariable(axis, {}), ConfigError);
    CHECK_THROWS_AS(
        LinguisticVariable(axis, {Term{"A", MembershipFunction::triangular(0, 1, 2)},
                                  Term{"A", MembershipFunction::triangular(1, 2, 3)}}),
        ConfigError);
    CHECK_THROWS_AS(
        LinguisticVariable(axis, {Term{"A", MembershipFunction::triangular(-5, 1, 2)}}),
        ConfigError);
    CHECK_THROWS_AS(LinguisticVariable(UniverseAxis{"v", 0.0, 100.0, 30.0},
                                       {Term{"A", MembershipFunction::triangular(0, 1, 2)}}),
                    ConfigError); // fewer than 10 grid intervals
}

TEST_CASE("evaluate_rules composes AND with min and reports zero strengths") {
    const fuzzy::InferenceEngine engine = config::default_engine();

    // mu_rain peaks at 0 degrees; rule 1 then fires with strength 1.
    auto rain = engine.evaluate_rules({{"crowd", 40.0}, {"weather", 0.0}});
    REQUIRE(rain.size() == 4);
    CHECK(rain[0].strength == 1.0);

    auto busy = engine.evaluate_rules({{"crowd", 72.0}, {"weather", 30.0}});
    CHECK(busy[0].strength == 0.0);
    CHECK(busy[1].strength == 0.0);
    CHECK(busy[2].strength == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(busy[3].strength == doctest::Approx(2.0 / 30.0).epsilon(1e-12));

    auto mid = engine.evaluate_rules({{"crowd", 50.0}, {"weather", 30.0}});
    CHECK(mid[0].strength == 0.0);
    CHECK(mid[1].strength == 0.0);
    CHECK(mid[2].strength == doctest::Approx(0.85).epsilon(1e-12)); // min(mu_outlook(30), 1)
    CHECK(mid[3].strength == 0.0);

    CHECK_THROWS_AS(engine.evaluate_rules({{"crowd", 50.0}}), DataError); // weather missing
}

TEST_CASE("aggregate clips with min and merges with max") {
    const fuzzy::InferenceEngine engine = config::default_engine();

    SUBCASE("strength zero yields an all-zero curve") {
        std::vector<fuzzy::RuleActivation> acts{{2, 0.0}};
        const fuzzy::SampledCurve curve = engine.aggregate(acts);
        CHECK(curve.empty_mass());
        CHECK(curve.atoms.empty());
    }

    SUBCASE("strength one reproduces the consequent on the grid") {
        std::vector<fuzzy::RuleActivation> acts{{2, 1.0}}; // rule 3 -> time Medium
        const fuzzy::SampledCurve curve = engine.aggregate(acts);
        const MembershipFunction medium = MembershipFunction::triangular(90, 150, 210);
        for (std::size_t i = 0; i < curve.values.size(); ++i) {
            const double x = curve.lo + curve.step * static_cast<double>(i);
            REQUIRE(curve.values[i] == medium(x));
        }
    }

    SUBCASE("two clipped consequents merge pointwise (hand-checked grid)") {
        std::vector<fuzzy::RuleActivation> acts{{2, 0.12}, {3, 0.40}};
        const fuzzy::SampledCurve curve = engine.aggregate(acts);
        auto at = [&](double x) {
            return curve.values[static_cast<std::size_t>((x - curve.lo) / curve.step)];
        };
        CHECK(at(120.0) == doctest::Approx(0.12).epsilon(1e-12));
        CHECK(at(150.0) == doctest::Approx(0.12).epsilon(1e-12));
        CHECK(at(204.0) == doctest::Approx(0.40).epsilon(1e-12));
        CHECK(at(240.0) == doctest::Approx(0.40).epsilon(1e-12));
        CHECK(at(290.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }

    SUBCASE("singleton consequents become atoms, deduplicated by max") {
        std::vector<fuzzy::RuleActivation> acts{{0, 0.3}, {0, 0.7}};
        const fuzzy::SampledCurve curve = engine.aggregate(acts);
        REQUIRE(curve.atoms.size() == 1);
        CHECK(curve.atoms[0].first == 0.0);
        CHECK(curve.atoms[0].second == 0.7);
    }
}

TEST_CASE("defuzzify_centroid") {
    SUBCASE("symmetric clipped triangle keeps its center") {
        const fuzzy::InferenceEngine engine = config::default_engine();
        for (double h : {0.1, 0.5, 1.0}) {
            std::vector<fuzzy::RuleActivation> acts{{2, h}};
            auto [crisp, flag] = fuzzy::defuzzify_centroid(engine.aggregate(acts));
            CHECK(flag == fuzzy::InferenceFlag::Ok);
            CHECK(crisp == doctest::Approx(150.0).epsilon(1e-12));
        }
    }

    SUBCASE("all-zero curve flags NoRuleFired at the axis floor") {
        fuzzy::SampledCurve curve;
        curve.lo = 0.0;
        curve.step = 0.5;
        curve.values.assign(601, 0.0);
        auto [crisp, flag] = fuzzy::defuzzify_centroid(curve);
        CHECK(crisp == 0.0);
        CHECK(flag == fuzzy::InferenceFlag::NoRuleFired);
    }

    SUBCASE("a lone atom pins the centroid to its position") {
        fuzzy::SampledCurve curve;
        curve.lo = 0.0;
        curve.step = 0.5;
        curve.values.assign(601, 0.0);
        curve.atoms.emplace_back(0.0, 0.4);
        auto [crisp, flag] = fuzzy::defuzzify_centroid(curve);
        CHECK(flag == fuzzy::InferenceFlag::Ok);
        CHECK(crisp == 0.0);
    }
}

TEST_CASE("infer reproduces the frozen reference values") {
    const fuzzy::InferenceEngine engine = config::default_engine();

    SUBCASE("published scenario: crowd 72, temp 30") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 72.0}, {"weather", 30.0}});
        CHECK(out.flag == fuzzy::InferenceFlag::Ok);
        // 181.64 s = 3.03 min on the 0.5 s grid; fine-grid oracle 181.6339.
        CHECK(out.crisp == doctest::Approx(181.6355259790).epsilon(1e-9));
        CHECK(std::abs(out.crisp - oracle::centroid(72.0, 30.0).crisp) <= 0.5);
        const fuzzy::RuleActivation* top = out.strongest();
        REQUIRE(top != nullptr);
        CHECK(top->rule_index == 2); // Medium consequent dominates at 0.12
    }

    SUBCASE("crowd 50, temp 30 is the symmetric single-rule case") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 50.0}, {"weather", 30.0}});
        CHECK(out.crisp == doctest::Approx(150.0).epsilon(1e-12));
    }

    SUBCASE("crowd 10, temp 30 rides the Short consequent") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 10.0}, {"weather", 30.0}});
        CHECK(out.crisp == doctest::Approx(60.0).epsilon(1e-12));
    }

    SUBCASE("mixed atom + curve mass (crowd 0, temp 8)") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 0.0}, {"weather", 8.0}});
        CHECK(out.crisp == doctest::Approx(53.8618925831).epsilon(1e-9));
        CHECK(std::abs(out.crisp - oracle::centroid(0.0, 8.0).crisp) <= 0.5);
    }

    SUBCASE("zero-mass inputs flag NoRuleFired") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 40.0}, {"weather", 50.0}});
        CHECK(out.flag == fuzzy::InferenceFlag::NoRuleFired);
        CHECK(out.crisp == 0.0);
        CHECK(out.strongest() == nullptr);
    }

    SUBCASE("rain-only input defuzzifies to exactly zero") {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 40.0}, {"weather", 3.0}});
        // mu_outlook(3) = 0: only the Stop atom carries mass.
        CHECK(out.flag == fuzzy::InferenceFlag::Ok);
        CHECK(out.crisp == 0.0);
    }
}

TEST_CASE("engine centroid tracks the fine-grid oracle within 0.5 s") {
    const fuzzy::InferenceEngine engine = config::default_engine();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> crowd_dist(0.0, 100.0);
    std::uniform_real_distribution<double> temp_dist(0.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double crowd = crowd_dist(rng);
        const double temp = temp_dist(rng);
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", crowd}, {"weather", temp}});
        const oracle::CentroidResult ref = oracle::centroid(crowd, temp);
        REQUIRE((out.flag == fuzzy::InferenceFlag::Ok) == ref.fired);
        if (ref.fired) REQUIRE(std::abs(out.crisp - ref.crisp) <= 0.5);
    }
}

TEST_CASE("crisp output stays inside the aggregate support when rules fire") {
    const fuzzy::InferenceEngine engine = config::default_engine();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> crowd_dist(0.0, 100.0);
    std::uniform_real_distribution<double> temp_dist(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const fuzzy::FuzzyOutcome out =
            engine.infer({{"crowd", crowd_dist(rng)}, {"weather", temp_dist(rng)}});
        if (out.flag != fuzzy::InferenceFlag::Ok) continue;
        REQUIRE(out.crisp >= out.aggregate.support_lo());
        REQUIRE(out.crisp <= out.aggregate.support_hi());
    }
}

TEST_CASE("clip height cancels for a lone symmetric consequent") {
    // Only rule 3 fires at crowd 50 for any temperature in the Outlook-only
    // band; its strength varies but the centroid must stay put.
    const fuzzy::InferenceEngine engine = config::default_engine();
    for (double temp = 24.5; temp < 47.0; temp += 1.0) {
        const fuzzy::FuzzyOutcome out = engine.infer({{"crowd", 50.0}, {"weather", temp}});
        REQUIRE(out.flag == fuzzy::InferenceFlag::Ok);
        REQUIRE(out.crisp == doctest::Approx(150.0).epsilon(1e-12));
    }
}

TEST_CASE("identical inputs produce bit-identical outcomes") {
    const fuzzy::InferenceEngine engine = config::default_engine();
    const fuzzy::FuzzyOutcome a = engine.infer({{"crowd", 72.0}, {"weather", 30.0}});
    const fuzzy::FuzzyOutcome b = engine.infer({{"crowd", 72.0}, {"weather", 30.0}});
    CHECK(std::memcmp(&a.crisp, &b.crisp, sizeof(double)) == 0);
    REQUIRE(a.aggregate.values.size() == b.aggregate.values.size());
    CHECK(std::memcmp(a.aggregate.values.data(), b.aggregate.values.data(),
                      a.aggregate.values.size() * sizeof(double)) == 0);
    REQUIRE(a.fired.size() == b.fired.size());
    for (std::size_t i = 0; i < a.fired.size(); ++i)
        CHECK(std::memcmp(&a.fired[i].strength, &b.fired[i].strength, sizeof(double)) == 0);
}

TEST_CASE("engine construction rejects dangling references") {
    using fuzzy::Rule;
    auto make = [](std::vector<Rule> rules) {
        fuzzy::InferenceEngine({fuzzy::LinguisticVariable(
                                   {"in", 0.0, 10.0, 0.5},
                                   {{"Low", MembershipFunction::triangular(0, 0, 5)}})},
                               fuzzy::LinguisticVariable(
                                   {"out", 0.0, 10.0, 0.5},
                                   {{"Small", MembershipFunction::triangular(0, 5, 10)}}),
                               std::move(rules));
    };
    CHECK_THROWS_AS(make({{{{"nope", "Low"}}, {"out", "Small"}}}), ConfigError);
    CHECK_THROWS_AS(make({{{{"in", "nope"}}, {"out", "Small"}}}), ConfigError);
    CHECK_THROWS_AS(make({{{{"in", "Low"}}, {"out", "nope"}}}), ConfigError);
    CHECK_THROWS_AS(make({{{{"in", "Low"}}, {"in", "Low"}}}), ConfigError); // consequent not output
    CHECK_THROWS_AS(make({}), ConfigError);
}
