#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "domectl/config.hpp"
#include "domectl/ingest.hpp"

using namespace domectl;

namespace {

std::istringstream stream(const char* text) { return std::istringstream(text); }

} // namespace

TEST_CASE("weather csv: well-formed fixture round-trips") {
    auto in = stream(
        "date,hour,minute,day,temperature,humidity,wind,barometer,visibility\n"
        "2018-06-01,0,0,Friday,30,45,11,29.77,6\n"
        "2018-06-01,1,0,Friday,29.5,47,9,29.76,6\n"
        "2018-06-01,2,0,Friday,29,50,8,29.75,5.5\n");
    const ingest::WeatherTable t = ingest::parse_weather_csv(in);
    REQUIRE(t.records.size() == 3);
    CHECK(t.faults.empty());

    const ingest::WeatherRecord& r = t.records[1];
    CHECK(r.when.year == 2018);
    CHECK(r.when.hour == 1);
    CHECK(r.temperature == 29.5);
    CHECK(r.humidity == 47.0);
    CHECK(r.wind == 9.0);
    CHECK(r.barometer == 29.76);
    CHECK(r.day_name == "Friday");
    CHECK(!r.rain);
    CHECK(r.timestamp == *core::parse_datetime("2018-06-01T01:00:00"));

    // serialize(parse(fixture)) -> parse again -> identical field values
    std::ostringstream out;
    ingest::write_weather_csv(out, t.records);
    auto in2 = std::istringstream(out.str());
    const ingest::WeatherTable t2 = ingest::parse_weather_csv(in2);
    REQUIRE(t2.records.size() == t.records.size());
    CHECK(t2.faults.empty());
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        CHECK(t2.records[i].timestamp == t.records[i].timestamp);
        CHECK(t2.records[i].temperature == t.records[i].temperature);
        CHECK(t2.records[i].humidity == t.records[i].humidity);
        CHECK(t2.records[i].wind == t.records[i].wind);
        CHECK(t2.records[i].barometer == t.records[i].barometer);
        CHECK(t2.records[i].visibility == t.records[i].visibility);
        CHECK(t2.records[i].day_name == t.records[i].day_name);
        CHECK(t2.records[i].rain == t.records[i].rain);
    }
}

TEST_CASE("weather csv: malformed rows fault without aborting") {
    auto in = stream(
        "date,hour,minute,temperature,humidity\n"
        "2018-06-01,0,0,abc,45\n"       // unparseable temperature
        "2018-06-01,1,0,30,45\n"        // fine
        "2018-06-01,24,0,30,45\n"       // hour out of range
        "2018-06-01,2,0,120,45\n"       // beyond the sensor envelope
        "2018-06-31,3,0,30,45\n"        // no such date
        "2018-06-01,4,0,30,45,extra\n"  // width mismatch
        "2018-06-01,5,0,30,101\n");     // humidity out of range
    const ingest::WeatherTable t = ingest::parse_weather_csv(in);
    CHECK(t.records.size() == 1);
    CHECK(t.faults.size() == 6);
    // fault count + record count = data row count
    CHECK(t.records.size() + t.faults.size() == 7);
    CHECK(t.faults[0].line == 2);
}

TEST_CASE("weather csv: schema errors are fatal") {
    auto missing = stream("date,hour,minute,temperature\n2018-06-01,0,0,30\n");
    CHECK_THROWS_AS(ingest::parse_weather_csv(missing), DataError);
    auto empty = stream("");
    CHECK_THROWS_AS(ingest::parse_weather_csv(empty), DataError);
}

TEST_CASE("weather csv: optional rain column and ignored extras") {
    auto in = stream(
        "date,hour,minute,temperature,humidity,rain,mystery\n"
        "2018-06-01,7,0,25,60,true,whatever\n"
        "2018-06-01,8,0,26,58,false,whatever\n");
    const ingest::WeatherTable t = ingest::parse_weather_csv(in);
    REQUIRE(t.records.size() == 2);
    CHECK(t.records[0].rain);
    CHECK(!t.records[1].rain);
}

TEST_CASE("crowd profile: counts convert through capacity") {
    auto in = stream(
        "timestamp,count\n"
        "2018-06-01T00:00:00,349000\n"
        "2018-06-01T01:00:00,502560\n");
    const ingest::CrowdProfile p = ingest::parse_crowd_profile(in, 698000);
    REQUIRE(p.entries.size() == 2);
    CHECK(p.faults.empty());
    CHECK(p.entries[0].ratio == 50.0);
    CHECK(p.entries[1].ratio == 72.0);
    REQUIRE(p.entries[0].count.has_value());
    CHECK(*p.entries[0].count == 349000.0);
    CHECK(p.entries[0].source == ingest::CrowdSource::File);
}

TEST_CASE("crowd profile: ratios clamp with fault notes") {
    auto in = stream(
        "timestamp,ratio\n"
        "2018-06-01T00:00:00,120\n"
        "2018-06-01T01:00:00,-3\n"
        "2018-06-01T02:00:00,55.5\n");
    const ingest::CrowdProfile p = ingest::parse_crowd_profile(in, 698000);
    REQUIRE(p.entries.size() == 3);
    CHECK(p.entries[0].ratio == 100.0);
    CHECK(p.entries[1].ratio == 0.0);
    CHECK(p.entries[2].ratio == 55.5);
    CHECK(p.faults.size() == 2);
}

TEST_CASE("crowd profile: non-monotone timestamps fault and re-sort") {
    auto in = stream(
        "timestamp,ratio\n"
        "2018-06-01T05:00:00,10\n"
        "2018-06-01T03:00:00,20\n");
    const ingest::CrowdProfile p = ingest::parse_crowd_profile(in, 698000);
    REQUIRE(p.entries.size() == 2);
    CHECK(p.faults.size() == 1);
    CHECK(p.entries[0].ratio == 20.0); // 03:00 first after sorting
    CHECK(p.entries[0].timestamp < p.entries[1].timestamp);
}

TEST_CASE("crowd profile: schema rules") {
    auto both = stream("timestamp,count,ratio\n");
    CHECK_THROWS_AS(ingest::parse_crowd_profile(both, 698000), DataError);
    auto neither = stream("timestamp,value\n");
    CHECK_THROWS_AS(ingest::parse_crowd_profile(neither, 698000), DataError);
    auto empty = stream("");
    CHECK_THROWS_AS(ingest::parse_crowd_profile(empty, 698000), DataError);

    auto header_only = stream("timestamp,ratio\n");
    const ingest::CrowdProfile p = ingest::parse_crowd_profile(header_only, 698000);
    CHECK(p.entries.empty()); // simulator then runs fail-safe

    auto ok = stream("timestamp,count\n2018-06-01T00:00:00,10\n");
    CHECK_THROWS_AS(ingest::parse_crowd_profile(ok, 0), ConfigError);
}

TEST_CASE("crowd profile round-trips through the serializer") {
    auto in = stream(
        "timestamp,ratio\n"
        "2018-06-01T00:00:00,50\n"
        "2018-06-01T01:00:00,72.25\n");
    const ingest::CrowdProfile p = ingest::parse_crowd_profile(in, 698000);
    std::ostringstream out;
    ingest::write_crowd_profile(out, p.entries);
    auto in2 = std::istringstream(out.str());
    const ingest::CrowdProfile p2 = ingest::parse_crowd_profile(in2, 698000);
    REQUIRE(p2.entries.size() == p.entries.size());
    for (std::size_t i = 0; i < p.entries.size(); ++i) {
        CHECK(p2.entries[i].timestamp == p.entries[i].timestamp);
        CHECK(p2.entries[i].ratio == p.entries[i].ratio);
    }
}

TEST_CASE("annotation files parse and validate") {
    auto in = stream(
        "# toy scene\n"
        "64 48\n"
        "32 16\n"
        "1.5 2.25\n");
    const density::HeadAnnotations ann = ingest::parse_annotations(in);
    CHECK(ann.width == 64);
    CHECK(ann.height == 48);
    REQUIRE(ann.points.size() == 2);
    CHECK(ann.points[1].x == 1.5);
    CHECK(ann.points[1].y == 2.25);

    std::ostringstream out;
    ingest::write_annotations(out, ann);
    auto in2 = std::istringstream(out.str());
    const density::HeadAnnotations ann2 = ingest::parse_annotations(in2);
    CHECK(ann2.width == ann.width);
    CHECK(ann2.points.size() == ann.points.size());
    CHECK(ann2.points[0].x == ann.points[0].x);

    auto out_of_image = stream("8 8\n9 1\n");
    CHECK_THROWS_AS(ingest::parse_annotations(out_of_image), DataError);
    auto no_size = stream("# nothing\n");
    CHECK_THROWS_AS(ingest::parse_annotations(no_size), DataError);
    auto garbage = stream("8 8\nfoo bar\n");
    CHECK_THROWS_AS(ingest::parse_annotations(garbage), DataError);
}

TEST_CASE("number-list files") {
    auto in = stream("# counts\n267\n453\n");
    const std::vector<double> xs = ingest::parse_number_lines(in);
    REQUIRE(xs.size() == 2);
    CHECK(xs[0] == 267.0);
    auto bad = stream("12\nnope\n");
    CHECK_THROWS_AS(ingest::parse_number_lines(bad), DataError);
}

TEST_CASE("empty config yields the full default configuration") {
    auto in = stream("");
    const config::Config cfg = config::load_config(in);
    CHECK(cfg.controller.capacity == 698000);
    CHECK(cfg.controller.dome_count == 27);
    CHECK(cfg.controller.travel_seconds == 60.0);
    CHECK(cfg.density.k == 4);
    CHECK(cfg.density.beta == 0.3);
    CHECK(cfg.density.fallback_sigma == 15.0);

    // The engine is the published reconstruction.
    const fuzzy::FuzzyOutcome out = cfg.engine.infer({{"crowd", 72.0}, {"weather", 30.0}});
    CHECK(out.crisp == doctest::Approx(181.6355259790).epsilon(1e-9));
    CHECK(cfg.engine.rules().size() == 4);
}

TEST_CASE("config: controller and density keys override defaults") {
    auto in = stream(
        "# overrides\n"
        "[controller]\n"
        "capacity = 500000\n"
        "domes = 12\n"
        "travel_seconds = 45\n"
        "\n"
        "[density]\n"
        "beta = 0.25\n"
        "k = 3\n");
    const config::Config cfg = config::load_config(in);
    CHECK(cfg.controller.capacity == 500000);
    CHECK(cfg.controller.dome_count == 12);
    CHECK(cfg.controller.travel_seconds == 45.0);
    CHECK(cfg.controller.head_minute == 0); // untouched keys keep defaults
    CHECK(cfg.density.beta == 0.25);
    CHECK(cfg.density.k == 3);
    CHECK(cfg.density.fallback_sigma == 15.0);
}

TEST_CASE("config: replacing one engine variable keeps the rest") {
    auto in = stream(
        "[engine.crowd]\n"
        "axis = 0 100 0.5\n"
        "term = NoCrowd trapezoidal 0 0 25 30\n"
        "term = Medium triangular 25 50 75\n"
        "term = Crowd trapezoidal 70 75 100 100\n");
    const config::Config cfg = config::load_config(in);
    // Crowd label set swapped to trapezoidal shoulders; weather untouched.
    const auto degrees = cfg.engine.input("crowd").fuzzify(72.0);
    CHECK(degrees.at("Crowd") == doctest::Approx(0.4).epsilon(1e-12)); // (72-70)/5
    const fuzzy::FuzzyOutcome out = cfg.engine.infer({{"crowd", 50.0}, {"weather", 30.0}});
    CHECK(out.crisp == doctest::Approx(150.0).epsilon(1e-9));
}

TEST_CASE("config: custom rules parse") {
    auto in = stream(
        "[engine.rules]\n"
        "rule = if weather is Rain then time is Stop\n"
        "rule = if weather is Outlook and crowd is Crowd then time is Tall\n");
    const config::Config cfg = config::load_config(in);
    CHECK(cfg.engine.rules().size() == 2);
    const fuzzy::FuzzyOutcome out = cfg.engine.infer({{"crowd", 100.0}, {"weather", 27.0}});
    CHECK(out.crisp == doctest::Approx(240.0).epsilon(1e-9)); // lone Tall triangle
}

TEST_CASE("config: diagnostics name the offending line") {
    auto bad_term = stream("[engine.crowd]\naxis = 0 100 0.5\nterm = Broken triangular 50 25 75\n");
    CHECK_THROWS_WITH_AS(config::load_config(bad_term, "test.ini"),
                         doctest::Contains("test.ini:3"), ConfigError);

    auto bad_section = stream("[nope]\n");
    CHECK_THROWS_AS(config::load_config(bad_section), ConfigError);

    auto bad_key = stream("[controller]\nwarp_speed = 9\n");
    CHECK_THROWS_AS(config::load_config(bad_key), ConfigError);

    auto missing_axis = stream("[engine.crowd]\nterm = A triangular 0 1 2\n");
    CHECK_THROWS_AS(config::load_config(missing_axis), ConfigError);

    auto stray = stream("capacity = 1\n");
    CHECK_THROWS_AS(config::load_config(stray), ConfigError);

    auto bad_rule = stream("[engine.rules]\nrule = if weather Rain then time is Stop\n");
    CHECK_THROWS_AS(config::load_config(bad_rule), ConfigError);

    auto dangling = stream("[engine.rules]\nrule = if weather is Sleet then time is Stop\n");
    CHECK_THROWS_AS(config::load_config(dangling), ConfigError);

    auto bad_value = stream("[controller]\ncapacity = lots\n");
    CHECK_THROWS_AS(config::load_config(bad_value), ConfigError);
}

TEST_CASE("config file loader") {
    CHECK_THROWS_AS(config::load_config_file("/nonexistent/path.ini"), ConfigError);
}
