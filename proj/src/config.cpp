#include "domectl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <vector>

namespace domectl::config {

using fuzzy::LinguisticVariable;
using fuzzy::MembershipFunction;
using fuzzy::Rule;
using fuzzy::Term;
using fuzzy::UniverseAxis;

namespace {

LinguisticVariable default_crowd() {
    return LinguisticVariable(
        {"crowd", 0.0, 100.0, 0.5},
        {{"NoCrowd", MembershipFunction::triangular(0, 0, 30)},
         {"Medium", MembershipFunction::triangular(25, 50, 75)},
         {"Crowd", MembershipFunction::triangular(70, 100, 100)}});
}

LinguisticVariable default_weather() {
    return LinguisticVariable({"weather", 0.0, 50.0, 0.5},
                              {{"Rain", MembershipFunction::triangular(0, 0, 24)},
                               {"Outlook", MembershipFunction::triangular(7, 27, 47)}});
}

LinguisticVariable default_time() {
    return LinguisticVariable({"time", 0.0, 300.0, 0.5},
                              {{"Stop", MembershipFunction::singleton(0)},
                               {"Short", MembershipFunction::triangular(0, 60, 120)},
                               {"Medium", MembershipFunction::triangular(90, 150, 210)},
                               {"Tall", MembershipFunction::triangular(180, 240, 300)}});
}

std::vector<Rule> default_rules() {
    return {
        {{{"weather", "Rain"}}, {"time", "Stop"}},
        {{{"weather", "Outlook"}, {"crowd", "NoCrowd"}}, {"time", "Short"}},
        {{{"weather", "Outlook"}, {"crowd", "Medium"}}, {"time", "Medium"}},
        {{{"weather", "Outlook"}, {"crowd", "Crowd"}}, {"time", "Tall"}},
    };
}

} // namespace

fuzzy::InferenceEngine default_engine() {
    return fuzzy::InferenceEngine({default_crowd(), default_weather()}, default_time(),
                                  default_rules());
}

Config default_config() {
    return {default_engine(), dome::ControllerConfig{}, density::KernelParams{}};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Structured-text loader state; diagnostics carry "<name>:<line>:".
struct Loader {
    std::string name;
    std::size_t line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(name + ":" + std::to_string(line_no) + ": " + msg);
    }

    double number(std::string_view s) const {
        const std::string_view t = trim(s);
        double v = 0.0;
        const char* end = t.data() + t.size();
        auto [ptr, ec] = std::from_chars(t.data(), end, v);
        if (ec != std::errc{} || ptr != end) fail("expected a number, got '" + std::string(t) + "'");
        return v;
    }

    std::int64_t integer(std::string_view s) const {
        const std::string_view t = trim(s);
        std::int64_t v = 0;
        const char* end = t.data() + t.size();
        auto [ptr, ec] = std::from_chars(t.data(), end, v);
        if (ec != std::errc{} || ptr != end) fail("expected an integer, got '" + std::string(t) + "'");
        return v;
    }
};

// A variable section under construction: axis plus ordered terms.
struct VariableDraft {
    std::optional<UniverseAxis> axis;
    std::vector<Term> terms;
    std::size_t opened_at = 0;
};

MembershipFunction make_mf(const Loader& ld, const std::string& shape,
                           std::span<const std::string> params) {
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            ld.fail("shape '" + shape + "' takes " + std::to_string(n) + " breakpoints, got " +
                    std::to_string(params.size()));
    };
    if (shape == "triangular") {
        need(3);
        return MembershipFunction::triangular(ld.number(params[0]), ld.number(params[1]),
                                              ld.number(params[2]));
    }
    if (shape == "trapezoidal") {
        need(4);
        return MembershipFunction::trapezoidal(ld.number(params[0]), ld.number(params[1]),
                                               ld.number(params[2]), ld.number(params[3]));
    }
    if (shape == "singleton") {
        need(1);
        return MembershipFunction::singleton(ld.number(params[0]));
    }
    ld.fail("unknown shape '" + shape + "' (triangular|trapezoidal|singleton)");
}

Rule parse_rule(const Loader& ld, std::string_view text) {
    // if <var> is <term> [and <var> is <term>]... then <var> is <term>
    const std::vector<std::string> tok = tokens(text);
    auto expect = [&](std::size_t i, std::string_view word) {
        if (i >= tok.size() || tok[i] != word)
            ld.fail("rule syntax: expected '" + std::string(word) + "' at token " +
                    std::to_string(i + 1));
    };
    expect(0, "if");
    Rule rule;
    std::size_t i = 1;
    while (true) {
        if (i + 2 >= tok.size()) ld.fail("rule syntax: truncated clause");
        expect(i + 1, "is");
        rule.antecedent.push_back({tok[i], tok[i + 2]});
        i += 3;
        if (i < tok.size() && tok[i] == "and") {
            ++i;
            continue;
        }
        break;
    }
    expect(i, "then");
    if (i + 4 != tok.size()) ld.fail("rule syntax: expected '<var> is <term>' after 'then'");
    expect(i + 2, "is");
    rule.consequent = {tok[i + 1], tok[i + 3]};
    return rule;
}

} // namespace

Config load_config(std::istream& in, std::string_view source_name) {
    Loader ld{std::string(source_name), 0};

    enum class Section { None, Crowd, Weather, Time, Rules, Controller, Density };
    Section section = Section::None;

    VariableDraft crowd, weather, time;
    std::optional<std::vector<Rule>> rules;
    dome::ControllerConfig controller;
    density::KernelParams density;

    std::string line;
    while (std::getline(in, line)) {
        ++ld.line_no;
        std::string_view s = line;
        // Trailing comments start at '#' or ';'.
        const std::size_t hash = s.find_first_of("#;");
        if (hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']') ld.fail("unterminated section header");
            const std::string name(trim(s.substr(1, s.size() - 2)));
            if (name == "engine.crowd") section = Section::Crowd;
            else if (name == "engine.weather") section = Section::Weather;
            else if (name == "engine.time") section = Section::Time;
            else if (name == "engine.rules") section = Section::Rules;
            else if (name == "controller") section = Section::Controller;
            else if (name == "density") section = Section::Density;
            else ld.fail("unknown section '" + name + "'");
            if (section == Section::Crowd) crowd.opened_at = ld.line_no;
            if (section == Section::Weather) weather.opened_at = ld.line_no;
            if (section == Section::Time) time.opened_at = ld.line_no;
            if (section == Section::Rules && !rules) rules.emplace();
            continue;
        }

        const std::size_t eq = s.find('=');
        if (eq == std::string_view::npos) ld.fail("expected 'key = value'");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));

        auto var_line = [&](VariableDraft& draft, const char* var_name) {
            if (key == "axis") {
                const std::vector<std::string> p = tokens(value);
                if (p.size() != 3) ld.fail("axis takes '<lo> <hi> <step>'");
                draft.axis = UniverseAxis{var_name, ld.number(p[0]), ld.number(p[1]),
                                          ld.number(p[2])};
                return;
            }
            if (key == "term") {
                const std::vector<std::string> p = tokens(value);
                if (p.size() < 2) ld.fail("term takes '<label> <shape> <breakpoints...>'");
                try {
                    draft.terms.push_back(
                        {p[0], make_mf(ld, p[1], {p.data() + 2, p.size() - 2})});
                } catch (const ConfigError& e) {
                    // Re-raise naming the offending term if the shape ctor threw.
                    const std::string what = e.what();
                    if (what.find(ld.name + ":") == 0) throw;
                    ld.fail("term '" + p[0] + "': " + what);
                }
                return;
            }
            ld.fail("unknown key '" + key + "' in a variable section");
        };

        switch (section) {
            case Section::None:
                ld.fail("key outside any section");
            case Section::Crowd:
                var_line(crowd, "crowd");
                break;
            case Section::Weather:
                var_line(weather, "weather");
                break;
            case Section::Time:
                var_line(time, "time");
                break;
            case Section::Rules:
                if (key != "rule") ld.fail("rules section only takes 'rule = if ...'");
                rules->push_back(parse_rule(ld, value));
                break;
            case Section::Controller:
                if (key == "capacity") controller.capacity = ld.integer(value);
                else if (key == "domes") controller.dome_count = static_cast<int>(ld.integer(value));
                else if (key == "travel_seconds") controller.travel_seconds = ld.number(value);
                else if (key == "head_minute") controller.head_minute = static_cast<int>(ld.integer(value));
                else if (key == "staleness_seconds") controller.staleness_seconds = ld.integer(value);
                else ld.fail("unknown controller key '" + key + "'");
                break;
            case Section::Density:
                if (key == "k") density.k = static_cast<int>(ld.integer(value));
                else if (key == "beta") density.beta = ld.number(value);
                else if (key == "fallback_sigma") density.fallback_sigma = ld.number(value);
                else if (key == "truncation_sigmas") density.truncation_sigmas = ld.number(value);
                else ld.fail("unknown density key '" + key + "'");
                break;
        }
    }

    // A present variable section replaces its default wholesale and must be
    // self-contained; absent sections keep the built-in reconstruction.
    auto finish_var = [&](VariableDraft& draft, LinguisticVariable fallback,
                          const char* what) -> LinguisticVariable {
        if (!draft.axis && draft.terms.empty()) return fallback;
        ld.line_no = draft.opened_at;
        if (!draft.axis) ld.fail(std::string(what) + ": section needs an 'axis' line");
        if (draft.terms.empty()) ld.fail(std::string(what) + ": section needs 'term' lines");
        return LinguisticVariable(*draft.axis, std::move(draft.terms));
    };

    LinguisticVariable crowd_var = finish_var(crowd, default_crowd(), "engine.crowd");
    LinguisticVariable weather_var = finish_var(weather, default_weather(), "engine.weather");
    LinguisticVariable time_var = finish_var(time, default_time(), "engine.time");
    std::vector<Rule> rule_base = rules ? std::move(*rules) : default_rules();
    if (rule_base.empty()) throw ConfigError(ld.name + ": engine.rules section is empty");

    controller.validate();
    density.validate();
    return {fuzzy::InferenceEngine({std::move(crowd_var), std::move(weather_var)},
                                   std::move(time_var), std::move(rule_base)),
            controller, density};
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return load_config(in, path);
}

} // namespace domectl::config
