// domectl — fuzzy dome-ventilation controller CLI.
//
// Subcommands: decide, simulate, densitymap, eval, explain.
// Exit codes: 0 ok, 1 usage, 2 data fault, 3 config fault.
// Machine-parseable results go to stdout, diagnostics to stderr.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "domectl/config.hpp"
#include "domectl/density.hpp"
#include "domectl/dome.hpp"
#include "domectl/ingest.hpp"
#include "domectl/sim.hpp"

namespace {

using namespace domectl;

config::Config resolve_config(const std::string& flag_path) {
    // --config beats DOMECTL_CONFIG beats built-in defaults.
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("DOMECTL_CONFIG")) path = env;
    }
    if (path.empty()) return config::default_config();
    return config::load_config_file(path);
}

std::ifstream open_data_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw DataError(std::string(what) + ": cannot open '" + path + "'");
    return in;
}

void print_decision(const dome::DomeDecision& d, double ratio, double temp, bool rain) {
    std::printf("ratio=%.2f temp=%.2f rain=%d\n", ratio, temp, rain ? 1 : 0);
    const char* flag = d.trace.flag == fuzzy::InferenceFlag::Ok ? "ok" : "norule";
    std::printf("open_seconds=%.2f minutes=%.2f label=%s flag=%s\n", d.open_seconds,
                d.open_seconds / 60.0, d.label.c_str(), flag);
    std::printf("fired=");
    for (std::size_t i = 0; i < d.trace.fired.size(); ++i)
        std::printf("%s%zu:%.4f", i ? "," : "", d.trace.fired[i].rule_index + 1,
                    d.trace.fired[i].strength);
    std::printf("\n");
}

std::string rule_text(const fuzzy::Rule& r) {
    std::string out = "if ";
    for (std::size_t i = 0; i < r.antecedent.size(); ++i) {
        if (i) out += " and ";
        out += r.antecedent[i].variable + " is " + r.antecedent[i].term;
    }
    out += " then " + r.consequent.variable + " is " + r.consequent.term;
    return out;
}

struct CrowdFlags {
    double crowd = -1.0;
    double count = -1.0;
    std::int64_t capacity = 0;
};

// Shared by decide/explain: exactly one of --crowd / --count (+ --capacity).
dome::CrowdEstimate crowd_from_flags(const CrowdFlags& f, const config::Config& cfg) {
    if (f.count >= 0.0) {
        const std::int64_t cap = f.capacity > 0 ? f.capacity : cfg.controller.capacity;
        return dome::CrowdEstimate::from_count(f.count, cap);
    }
    return dome::CrowdEstimate::from_ratio(f.crowd);
}

int run(int argc, char** argv) {
    CLI::App app{"Fuzzy dome-ventilation controller and crowd-density toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // let --config appear after the subcommand too
    std::string config_path;
    app.add_option("--config", config_path, "Configuration file (default: DOMECTL_CONFIG or built-ins)");

    // decide ----------------------------------------------------------------
    auto* decide = app.add_subcommand("decide", "One controller decision from crisp inputs");
    CrowdFlags dc;
    double d_temp = 0.0, d_humidity = 0.0;
    bool d_rain = false;
    auto* d_crowd_opt = decide->add_option("--crowd", dc.crowd, "Crowd ratio in percent [0,100]");
    auto* d_count_opt = decide->add_option("--count", dc.count, "Crowd head count (persons)");
    auto* d_cap_opt = decide->add_option("--capacity", dc.capacity, "Venue capacity (persons)");
    decide->add_option("--temp", d_temp, "Temperature in °C")->required();
    decide->add_option("--humidity", d_humidity, "Relative humidity in % (logged only)");
    decide->add_flag("--rain,!--no-rain", d_rain, "Hardware rain flag");
    d_crowd_opt->excludes(d_count_opt);
    d_count_opt->needs(d_cap_opt);

    // simulate --------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Replay a weather/crowd timeline hour by hour");
    std::string s_weather, s_crowd, s_out;
    simulate->add_option("--weather", s_weather, "Weather history CSV")->required();
    simulate->add_option("--crowd-profile", s_crowd, "Crowd profile CSV")->required();
    simulate->add_option("--out", s_out, "Log file path (default: stdout)");

    // densitymap ------------------------------------------------------------
    auto* densitymap = app.add_subcommand("densitymap", "Render ground-truth density map");
    std::string m_annotations, m_out, m_text;
    densitymap->add_option("--annotations", m_annotations, "Head annotation file")->required();
    densitymap->add_option("--out", m_out, "Output DMAP file")->required();
    densitymap->add_option("--text", m_text, "Also dump a plain-text grid to this path");

    // eval ------------------------------------------------------------------
    auto* eval = app.add_subcommand("eval", "Count-accuracy metrics (MAE/RMSE)");
    std::string e_pred, e_truth;
    eval->add_option("--predicted", e_pred, "Predicted counts, one per line")->required();
    eval->add_option("--truth", e_truth, "True counts, one per line")->required();

    // explain ---------------------------------------------------------------
    auto* explain = app.add_subcommand("explain", "Per-rule trace for one decision");
    CrowdFlags xc;
    double x_temp = 0.0;
    bool x_rain = false;
    auto* x_crowd_opt = explain->add_option("--crowd", xc.crowd, "Crowd ratio in percent [0,100]");
    auto* x_count_opt = explain->add_option("--count", xc.count, "Crowd head count (persons)");
    auto* x_cap_opt = explain->add_option("--capacity", xc.capacity, "Venue capacity (persons)");
    explain->add_option("--temp", x_temp, "Temperature in °C")->required();
    explain->add_flag("--rain,!--no-rain", x_rain, "Hardware rain flag");
    x_crowd_opt->excludes(x_count_opt);
    x_count_opt->needs(x_cap_opt);

    // Documented exit codes (1 = usage) instead of CLI11's enum values.
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }

    if (decide->parsed()) {
        if (decide->count("--crowd") == 0 && decide->count("--count") == 0)
            throw CLI::RequiredError("--crowd or --count");
        const config::Config cfg = resolve_config(config_path);
        const dome::CrowdEstimate crowd = crowd_from_flags(dc, cfg);
        const dome::WeatherReading weather{d_temp, d_humidity, d_rain, 0};
        const dome::DomeDecision d = dome::decide(weather, crowd, cfg.engine);
        print_decision(d, crowd.ratio, d_temp, d_rain);
        return 0;
    }

    if (simulate->parsed()) {
        const config::Config cfg = resolve_config(config_path);
        std::ifstream wf = open_data_file(s_weather, "weather");
        const ingest::WeatherTable weather = ingest::parse_weather_csv(wf);
        std::ifstream cf = open_data_file(s_crowd, "crowd profile");
        const ingest::CrowdProfile crowd =
            ingest::parse_crowd_profile(cf, cfg.controller.capacity);
        for (const ingest::RowFault& f : weather.faults)
            std::fprintf(stderr, "weather:%zu: %s\n", f.line, f.message.c_str());
        for (const ingest::RowFault& f : crowd.faults)
            std::fprintf(stderr, "crowd:%zu: %s\n", f.line, f.message.c_str());

        const sim::ReplayResult result = sim::run_replay(weather.records, crowd.entries, cfg);
        if (s_out.empty()) {
            sim::write_log(std::cout, result);
        } else {
            std::ofstream out(s_out, std::ios::trunc);
            if (!out) throw DataError("simulate: cannot open '" + s_out + "' for writing");
            sim::write_log(out, result);
            std::printf("log=%s hours=%zu\n", s_out.c_str(), result.summary.hours);
        }
        return 0;
    }

    if (densitymap->parsed()) {
        const config::Config cfg = resolve_config(config_path);
        std::ifstream af = open_data_file(m_annotations, "annotations");
        const density::HeadAnnotations ann = ingest::parse_annotations(af);
        const density::DensityMap map = density::render_density_map(ann, cfg.density);
        density::write_dmap(m_out, map);
        if (!m_text.empty()) {
            std::ofstream tf(m_text, std::ios::trunc);
            if (!tf) throw DataError("densitymap: cannot open '" + m_text + "' for writing");
            density::write_text_grid(tf, map);
        }
        std::printf("out=%s width=%u height=%u heads=%zu sum=%.2f\n", m_out.c_str(), map.width,
                    map.height, ann.points.size(), density::count_from_map(map));
        return 0;
    }

    if (eval->parsed()) {
        std::ifstream pf = open_data_file(e_pred, "predicted");
        const std::vector<double> predicted = ingest::parse_number_lines(pf);
        std::ifstream tf = open_data_file(e_truth, "truth");
        const std::vector<double> truth = ingest::parse_number_lines(tf);
        const density::CountMetrics m = density::evaluate_counts(predicted, truth);
        std::printf("mae=%.2f rmse=%.2f n=%zu\n", m.mae, m.rmse, predicted.size());
        return 0;
    }

    if (explain->parsed()) {
        if (explain->count("--crowd") == 0 && explain->count("--count") == 0)
            throw CLI::RequiredError("--crowd or --count");
        const config::Config cfg = resolve_config(config_path);
        const dome::CrowdEstimate crowd = crowd_from_flags(xc, cfg);
        const dome::WeatherReading weather{x_temp, 0.0, x_rain, 0};
        const dome::DomeDecision d = dome::decide(weather, crowd, cfg.engine);
        if (x_rain) std::printf("override: rain flag set, engine bypassed\n");
        for (std::size_t i = 0; i < d.trace.fired.size(); ++i) {
            const fuzzy::Rule& r = cfg.engine.rules()[i];
            std::printf("rule %zu: strength=%.4f %s\n", i + 1, d.trace.fired[i].strength,
                        rule_text(r).c_str());
        }
        const char* flag = d.trace.flag == fuzzy::InferenceFlag::Ok ? "ok" : "norule";
        std::printf("crisp=%.2f minutes=%.2f label=%s flag=%s\n", d.open_seconds,
                    d.open_seconds / 60.0, d.label.c_str(), flag);
        return 0;
    }

    return 0; // unreachable: require_subcommand(1)
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Validation errors raised manually after parsing.
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const domectl::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const domectl::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
