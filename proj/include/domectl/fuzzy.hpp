#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "domectl/errors.hpp"

// Mamdani-style fuzzy inference: triangular/trapezoidal/singleton terms,
// min-conjunction rule evaluation, min-clip implication, max aggregation and
// centroid defuzzification by numeric integration on a fixed output grid.
// All types are immutable after construction; inference is a pure function
// of (engine, inputs) and safe for concurrent use.

namespace domectl::fuzzy {

/// Numeric axis a linguistic variable lives on. `step` is the discretization
/// pitch used when the axis serves as an output (integration grid); it must
/// divide the range evenly and produce at least 10 intervals.
struct UniverseAxis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.1;

    std::size_t grid_points() const;
    double value_at(std::size_t i) const { return lo + static_cast<double>(i) * step; }
    double clamp(double x) const;
    void validate() const; // throws ConfigError
};

class MembershipFunction {
public:
    enum class Shape { Triangular, Trapezoidal, Singleton };

    static MembershipFunction triangular(double a, double b, double c);
    static MembershipFunction trapezoidal(double a, double b, double c, double d);
    static MembershipFunction singleton(double p);

    /// Piecewise-linear membership degree in [0,1]; exact at breakpoints.
    double operator()(double x) const;

    Shape shape() const { return shape_; }
    bool is_singleton() const { return shape_ == Shape::Singleton; }
    std::span<const double> breakpoints() const { return {points_.data(), count_}; }
    double support_lo() const { return points_[0]; }
    double support_hi() const { return points_[count_ - 1]; }

private:
    MembershipFunction(Shape shape, std::array<double, 4> points, std::size_t count);

    Shape shape_;
    std::array<double, 4> points_{};
    std::size_t count_ = 0;
};

/// Free-function spelling of MembershipFunction::operator().
inline double membership_at(const MembershipFunction& mf, double x) { return mf(x); }

struct Term {
    std::string label;
    MembershipFunction mf;
};

class LinguisticVariable {
public:
    LinguisticVariable(UniverseAxis axis, std::vector<Term> terms); // throws ConfigError

    const UniverseAxis& axis() const { return axis_; }
    std::span<const Term> terms() const { return terms_; }
    const std::string& name() const { return axis_.name; }
    std::size_t term_index(std::string_view label) const; // throws ConfigError

    /// Membership degree of every term at x; x is clamped to the axis first.
    std::map<std::string, double> fuzzify(double x) const;

private:
    UniverseAxis axis_;
    std::vector<Term> terms_;
};

struct RuleClause {
    std::string variable;
    std::string term;
};

/// "if v1 is t1 and v2 is t2 ... then out is t" — AND-only antecedents.
struct Rule {
    std::vector<RuleClause> antecedent;
    RuleClause consequent;
};

struct RuleActivation {
    std::size_t rule_index = 0; // 0-based
    double strength = 0.0;
};

/// Aggregated output membership as a measure: a piecewise-linear curve
/// sampled on the output grid plus Dirac atoms contributed by singleton
/// consequents (atom mass = clip strength). With no atoms the centroid
/// reduces to the plain discrete form sum(x*mu)/sum(mu).
struct SampledCurve {
    double lo = 0.0;
    double step = 1.0;
    std::vector<double> values;
    std::vector<std::pair<double, double>> atoms; // (position, mass)

    bool empty_mass() const;
    /// Bounds of the positive-mass region (samples and atoms); lo when empty.
    double support_lo() const;
    double support_hi() const;
};

enum class InferenceFlag { Ok, NoRuleFired };

std::pair<double, InferenceFlag> defuzzify_centroid(const SampledCurve& curve);

struct FuzzyOutcome {
    double crisp = 0.0;
    SampledCurve aggregate;
    std::vector<RuleActivation> fired; // one entry per rule, zeros included
    InferenceFlag flag = InferenceFlag::NoRuleFired;

    /// Strongest positive activation; nullptr when nothing fired.
    const RuleActivation* strongest() const;
};

class InferenceEngine {
public:
    InferenceEngine(std::vector<LinguisticVariable> inputs, LinguisticVariable output,
                    std::vector<Rule> rules); // throws ConfigError on dangling references

    std::span<const LinguisticVariable> inputs() const { return inputs_; }
    const LinguisticVariable& output() const { return output_; }
    std::span<const Rule> rules() const { return rules_; }
    const LinguisticVariable& input(std::string_view name) const; // throws ConfigError

    /// min over antecedent clause degrees; every rule reported, zeros kept.
    std::vector<RuleActivation> evaluate_rules(const std::map<std::string, double>& crisp_inputs) const;

    /// Pointwise max of min-clipped consequents on the output grid.
    SampledCurve aggregate(std::span<const RuleActivation> activations) const;

    FuzzyOutcome infer(const std::map<std::string, double>& crisp_inputs) const;

    const std::string& consequent_label(std::size_t rule_index) const;

private:
    struct ResolvedClause {
        std::size_t variable = 0;
        std::size_t term = 0;
    };
    struct ResolvedRule {
        std::vector<ResolvedClause> antecedent;
        std::size_t consequent_term = 0;
    };

    std::vector<LinguisticVariable> inputs_;
    LinguisticVariable output_;
    std::vector<Rule> rules_;
    std::vector<ResolvedRule> resolved_;
    std::vector<std::vector<double>> term_samples_; // per output term; empty for singletons
    std::vector<double> grid_values_;
};

} // namespace domectl::fuzzy
