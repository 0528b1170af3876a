#include "domectl/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "domectl/kernels.hpp"

namespace domectl::fuzzy {

namespace {

std::string shape_name(MembershipFunction::Shape s) {
    switch (s) {
        case MembershipFunction::Shape::Triangular: return "triangular";
        case MembershipFunction::Shape::Trapezoidal: return "trapezoidal";
        case MembershipFunction::Shape::Singleton: return "singleton";
    }
    return "?";
}

} // namespace

std::size_t UniverseAxis::grid_points() const {
    return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

double UniverseAxis::clamp(double x) const {
    return std::min(std::max(x, lo), hi);
}

void UniverseAxis::validate() const {
    if (name.empty())
        throw ConfigError("axis: name must not be empty");
    if (!(lo < hi))
        throw ConfigError("axis '" + name + "': lo must be < hi");
    if (!(step > 0.0))
        throw ConfigError("axis '" + name + "': step must be > 0");
    const double intervals = (hi - lo) / step;
    const double rounded = std::round(intervals);
    if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, std::abs(intervals)))
        throw ConfigError("axis '" + name + "': step must divide the range evenly");
    if (rounded < 10.0)
        throw ConfigError("axis '" + name + "': grid needs at least 10 intervals");
}

MembershipFunction::MembershipFunction(Shape shape, std::array<double, 4> points, std::size_t count)
    : shape_(shape), points_(points), count_(count) {
    for (std::size_t i = 0; i < count_; ++i) {
        if (!std::isfinite(points_[i]))
            throw ConfigError(shape_name(shape_) + ": parameters must be finite");
        if (i > 0 && points_[i] < points_[i - 1])
            throw ConfigError(shape_name(shape_) + ": parameters must be non-decreasing");
    }
}

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
    MembershipFunction mf(Shape::Triangular, {a, b, c, 0.0}, 3);
    if (a == c)
        throw ConfigError("triangular: degenerate support (a == c)");
    return mf;
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
    MembershipFunction mf(Shape::Trapezoidal, {a, b, c, d}, 4);
    if (a == d)
        throw ConfigError("trapezoidal: degenerate support (a == d)");
    if (b > c)
        throw ConfigError("trapezoidal: plateau requires b <= c");
    return mf;
}

MembershipFunction MembershipFunction::singleton(double p) {
    return MembershipFunction(Shape::Singleton, {p, p, p, p}, 1);
}

double MembershipFunction::operator()(double x) const {
    switch (shape_) {
        case Shape::Singleton:
            return x == points_[0] ? 1.0 : 0.0;
        case Shape::Triangular: {
            const double a = points_[0], b = points_[1], c = points_[2];
            if (x <= a || x >= c) {
                // Degenerate shoulders: Tri(a,a,c) peaks at its left edge,
                // Tri(a,c,c) at its right one.
                if (x == a && b == a) return 1.0;
                if (x == c && b == c) return 1.0;
                return 0.0;
            }
            if (x == b) return 1.0;
            if (x < b) return (x - a) / (b - a);
            return (c - x) / (c - b);
        }
        case Shape::Trapezoidal: {
            const double a = points_[0], b = points_[1], c = points_[2], d = points_[3];
            if (x >= b && x <= c) return 1.0;
            if (x <= a || x >= d) {
                if (x == a && b == a) return 1.0;
                if (x == d && c == d) return 1.0;
                return 0.0;
            }
            if (x < b) return (x - a) / (b - a);
            return (d - x) / (d - c);
        }
    }
    return 0.0;
}

LinguisticVariable::LinguisticVariable(UniverseAxis axis, std::vector<Term> terms)
    : axis_(std::move(axis)), terms_(std::move(terms)) {
    axis_.validate();
    if (terms_.empty())
        throw ConfigError("variable '" + axis_.name + "': needs at least one term");
    std::set<std::string_view> seen;
    for (const Term& t : terms_) {
        if (t.label.empty())
            throw ConfigError("variable '" + axis_.name + "': term label must not be empty");
        if (!seen.insert(t.label).second)
            throw ConfigError("variable '" + axis_.name + "': duplicate term '" + t.label + "'");
        if (t.mf.support_lo() < axis_.lo || t.mf.support_hi() > axis_.hi)
            throw ConfigError("variable '" + axis_.name + "': term '" + t.label +
                              "' support exceeds axis range");
    }
}

std::size_t LinguisticVariable::term_index(std::string_view label) const {
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].label == label) return i;
    throw ConfigError("variable '" + axis_.name + "': unknown term '" + std::string(label) + "'");
}

std::map<std::string, double> LinguisticVariable::fuzzify(double x) const {
    const double cx = axis_.clamp(x);
    std::map<std::string, double> out;
    for (const Term& t : terms_) out.emplace(t.label, t.mf(cx));
    return out;
}

bool SampledCurve::empty_mass() const {
    for (double v : values)
        if (v > 0.0) return false;
    for (const auto& [p, m] : atoms)
        if (m > 0.0) return false;
    return true;
}

double SampledCurve::support_lo() const {
    double best = lo + step * static_cast<double>(values.size()); // past the end
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] > 0.0) {
            best = lo + step * static_cast<double>(i);
            break;
        }
    for (const auto& [p, m] : atoms)
        if (m > 0.0) best = std::min(best, p);
    return empty_mass() ? lo : best;
}

double SampledCurve::support_hi() const {
    double best = lo;
    for (std::size_t i = values.size(); i-- > 0;)
        if (values[i] > 0.0) {
            best = lo + step * static_cast<double>(i);
            break;
        }
    for (const auto& [p, m] : atoms)
        if (m > 0.0) best = std::max(best, p);
    return empty_mass() ? lo : best;
}

std::pair<double, InferenceFlag> defuzzify_centroid(const SampledCurve& curve) {
    // Discrete centroid over the grid samples, plus Dirac atoms from
    // singleton consequents. An atom of mass m at p behaves like a grid
    // sample of height m/step, which keeps the result stable under grid
    // refinement and reduces to sum(x*mu)/sum(mu) when no atoms exist.
    std::vector<double> xs(curve.values.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = curve.lo + curve.step * static_cast<double>(i);
    double num = kernels::dot(xs, curve.values);
    double den = kernels::sum(curve.values);
    for (const auto& [p, m] : curve.atoms) {
        num += p * (m / curve.step);
        den += m / curve.step;
    }
    if (den <= 0.0) return {curve.lo, InferenceFlag::NoRuleFired};
    return {num / den, InferenceFlag::Ok};
}

const RuleActivation* FuzzyOutcome::strongest() const {
    const RuleActivation* best = nullptr;
    for (const RuleActivation& a : fired)
        if (a.strength > 0.0 && (!best || a.strength > best->strength)) best = &a;
    return best;
}

InferenceEngine::InferenceEngine(std::vector<LinguisticVariable> inputs, LinguisticVariable output,
                                 std::vector<Rule> rules)
    : inputs_(std::move(inputs)), output_(std::move(output)), rules_(std::move(rules)) {
    if (rules_.empty())
        throw ConfigError("engine: rule base must not be empty");
    std::set<std::string_view> names;
    for (const LinguisticVariable& v : inputs_)
        if (!names.insert(v.name()).second)
            throw ConfigError("engine: duplicate input variable '" + v.name() + "'");
    if (names.contains(output_.name()))
        throw ConfigError("engine: output variable '" + output_.name() + "' collides with an input");

    auto input_index = [&](std::string_view name) -> std::size_t {
        for (std::size_t i = 0; i < inputs_.size(); ++i)
            if (inputs_[i].name() == name) return i;
        throw ConfigError("rule references unknown variable '" + std::string(name) + "'");
    };

    resolved_.reserve(rules_.size());
    for (const Rule& r : rules_) {
        if (r.antecedent.empty())
            throw ConfigError("rule: antecedent must not be empty");
        if (r.consequent.variable != output_.name())
            throw ConfigError("rule: consequent must target '" + output_.name() + "'");
        ResolvedRule rr;
        for (const RuleClause& c : r.antecedent) {
            const std::size_t vi = input_index(c.variable);
            rr.antecedent.push_back({vi, inputs_[vi].term_index(c.term)});
        }
        rr.consequent_term = output_.term_index(r.consequent.term);
        resolved_.push_back(std::move(rr));
    }

    // Pre-sample every non-singleton output term on the integration grid;
    // aggregation then reduces to clip+max over these fixed vectors.
    const UniverseAxis& ax = output_.axis();
    const std::size_t n = ax.grid_points();
    grid_values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) grid_values_[i] = ax.value_at(i);
    term_samples_.resize(output_.terms().size());
    for (std::size_t t = 0; t < output_.terms().size(); ++t) {
        const MembershipFunction& mf = output_.terms()[t].mf;
        if (mf.is_singleton()) continue;
        term_samples_[t].resize(n);
        for (std::size_t i = 0; i < n; ++i) term_samples_[t][i] = mf(grid_values_[i]);
    }
}

const LinguisticVariable& InferenceEngine::input(std::string_view name) const {
    for (const LinguisticVariable& v : inputs_)
        if (v.name() == name) return v;
    throw ConfigError("engine: unknown input variable '" + std::string(name) + "'");
}

std::vector<RuleActivation> InferenceEngine::evaluate_rules(
    const std::map<std::string, double>& crisp_inputs) const {
    // Clamp-and-fuzzify each input once, then read degrees per clause.
    std::vector<std::vector<double>> degrees(inputs_.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        auto it = crisp_inputs.find(inputs_[i].name());
        if (it == crisp_inputs.end())
            throw DataError("infer: missing input '" + inputs_[i].name() + "'");
        if (!std::isfinite(it->second))
            throw DataError("infer: input '" + inputs_[i].name() + "' is not finite");
        const double x = inputs_[i].axis().clamp(it->second);
        degrees[i].reserve(inputs_[i].terms().size());
        for (const Term& t : inputs_[i].terms()) degrees[i].push_back(t.mf(x));
    }

    std::vector<RuleActivation> out;
    out.reserve(resolved_.size());
    for (std::size_t r = 0; r < resolved_.size(); ++r) {
        double strength = 1.0;
        for (const ResolvedClause& c : resolved_[r].antecedent)
            strength = std::min(strength, degrees[c.variable][c.term]);
        out.push_back({r, strength});
    }
    return out;
}

SampledCurve InferenceEngine::aggregate(std::span<const RuleActivation> activations) const {
    const UniverseAxis& ax = output_.axis();
    SampledCurve curve;
    curve.lo = ax.lo;
    curve.step = ax.step;
    curve.values.assign(ax.grid_points(), 0.0);
    for (const RuleActivation& a : activations) {
        if (a.strength <= 0.0) continue;
        const std::size_t term = resolved_[a.rule_index].consequent_term;
        const MembershipFunction& mf = output_.terms()[term].mf;
        if (mf.is_singleton()) {
            curve.atoms.emplace_back(mf.support_lo(), a.strength);
        } else {
            kernels::clip_max(curve.values, term_samples_[term], a.strength);
        }
    }
    // Merge atoms at the same position: max, to mirror the curve aggregation.
    if (curve.atoms.size() > 1) {
        std::sort(curve.atoms.begin(), curve.atoms.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& [p, m] : curve.atoms) {
            if (!merged.empty() && merged.back().first == p)
                merged.back().second = std::max(merged.back().second, m);
            else
                merged.emplace_back(p, m);
        }
        curve.atoms = std::move(merged);
    }
    return curve;
}

FuzzyOutcome InferenceEngine::infer(const std::map<std::string, double>& crisp_inputs) const {
    FuzzyOutcome out;
    out.fired = evaluate_rules(crisp_inputs);
    out.aggregate = aggregate(out.fired);
    auto [crisp, flag] = defuzzify_centroid(out.aggregate);
    out.crisp = crisp;
    out.flag = flag;
    return out;
}

const std::string& InferenceEngine::consequent_label(std::size_t rule_index) const {
    if (rule_index >= rules_.size())
        throw ConfigError("engine: rule index out of range");
    return rules_[rule_index].consequent.term;
}

} // namespace domectl::fuzzy
