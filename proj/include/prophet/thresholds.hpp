#pragma once

#include <optional>
#include <span>

#include "prophet/distribution.hpp"
#include "prophet/instance.hpp"

namespace prophet {

inline constexpr double kPhi = 1.6180339887498948482;  // (1 + sqrt 5) / 2

/// Root in (0, 1) of x / (1 - x) = ln(1 / x), found by bisection.
double solve_lambda();

struct Constants {
    double phi;
    double inv_phi;
    double lambda;
    double ln_inv_lambda;
};

/// phi, 1/phi, lambda and ln(1/lambda); lambda is solved once and cached.
const Constants& constants();

/// Law of the maximum of a set of independent boxes.
///
/// The empty set is a first-class value: it has no atoms, P[max < x] = 1 for
/// every x > 0, and expectation 0. This is the "no boxes left" boundary of
/// every backward recursion.
class SuffixMaxDistribution {
public:
    static SuffixMaxDistribution empty() { return SuffixMaxDistribution(); }

    static SuffixMaxDistribution of(std::span<const DiscreteDistribution> boxes);
    static SuffixMaxDistribution of(const Instance& instance, std::span<const BoxId> ids);

    /// Law of max(this, independent box).
    SuffixMaxDistribution with_box(const DiscreteDistribution& box) const;

    bool empty_set() const { return !dist_.has_value(); }
    const DiscreteDistribution& distribution() const { return dist_.value(); }

    double expectation() const { return dist_ ? dist_->expectation() : 0.0; }
    double prob_below(double x, bool strict) const;

private:
    SuffixMaxDistribution() = default;
    explicit SuffixMaxDistribution(DiscreteDistribution dist) : dist_(std::move(dist)) {}

    std::optional<DiscreteDistribution> dist_;
};

SuffixMaxDistribution suffix_max(const Instance& instance, std::span<const BoxId> ids);

/// E[(y - c)^+]; zero for the empty set.
double expected_surplus(const SuffixMaxDistribution& dist, double c);

/// The unique x >= 0 with E[(y - phi x)^+] = x.
///
/// The left side is piecewise linear with breakpoints at support / phi; the
/// root is located on its segment and solved in closed form. A bisection
/// re-solve kicks in if the closed form ever leaves a residual above 1e-10.
double solve_beta(const SuffixMaxDistribution& dist);

struct ThresholdTriple {
    double alpha = 0.0;  // E[y] / phi
    double beta = 0.0;   // solve_beta
    double tau = 0.0;    // max(alpha, beta)
};

ThresholdTriple threshold_triple(const SuffixMaxDistribution& dist);

/// Single thresholds derived from the law of the overall maximum.
struct ClassicThresholds {
    double median_of_max = 0.0;      // smallest support value with P[max <= x] >= 1/2
    double half_expected_max = 0.0;  // E[max] / 2
    double inv_e_quantile = 0.0;     // smallest support value with P[max <= x] >= 1/e
};

ClassicThresholds classic_thresholds(const Instance& instance);

}  // namespace prophet
