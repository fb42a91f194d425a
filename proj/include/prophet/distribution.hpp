#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prophet/errors.hpp"

namespace prophet {

/// One atom of a finite distribution.
struct Outcome {
    double value = 0.0;
    double prob = 0.0;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Finite distribution of a box value.
///
/// Canonical form: outcomes sorted strictly increasing by value, every value
/// finite and non-negative, every probability in (0, 1], probabilities summing
/// to 1. Instances are immutable once built.
class DiscreteDistribution {
public:
    /// Canonicalizes raw (value, prob) pairs: merges duplicate values, sorts,
    /// and renormalizes when the total is within 1e-9 of 1. Throws
    /// ValidationError for anything else.
    static DiscreteDistribution from_outcomes(std::vector<Outcome> raw);

    static DiscreteDistribution point_mass(double value);

    /// `value` with probability p, 0 otherwise.
    static DiscreteDistribution two_point(double value, double p);

    std::span<const Outcome> outcomes() const { return outcomes_; }
    std::size_t size() const { return outcomes_.size(); }
    double min_value() const { return outcomes_.front().value; }
    double max_value() const { return outcomes_.back().value; }

    double expectation() const;

    /// P[v < x] when strict, P[v <= x] otherwise.
    double prob_below(double x, bool strict) const;

    /// Probability mass located exactly at x.
    double mass_at(double x) const;

    bool contains(double x) const { return mass_at(x) > 0.0; }

    /// Inverse-CDF lookup for u in [0, 1).
    double quantile_draw(double u) const;

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    friend class SuffixMaxDistribution;

    explicit DiscreteDistribution(std::vector<Outcome> canonical);
    DiscreteDistribution(std::vector<Outcome> canonical, std::vector<double> cdf)
        : outcomes_(std::move(canonical)), cdf_(std::move(cdf)) {}

    std::vector<Outcome> outcomes_;
    std::vector<double> cdf_;  // cdf_[i] = P[v <= outcomes_[i].value]
};

inline constexpr double kProbabilitySumTolerance = 1e-9;

double expectation(const DiscreteDistribution& dist);
double prob_below(const DiscreteDistribution& dist, double x, bool strict);

}  // namespace prophet
