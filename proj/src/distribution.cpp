#include "prophet/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prophet {

namespace {

std::vector<double> cumulative(const std::vector<Outcome>& outcomes) {
    std::vector<double> cdf(outcomes.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        acc += outcomes[i].prob;
        cdf[i] = acc;
    }
    // The top atom closes the distribution.
    if (!cdf.empty()) cdf.back() = 1.0;
    return cdf;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<Outcome> canonical)
    : outcomes_(std::move(canonical)), cdf_(cumulative(outcomes_)) {}

DiscreteDistribution DiscreteDistribution::from_outcomes(std::vector<Outcome> raw) {
    if (raw.empty()) throw ValidationError("distribution has no outcomes");
    for (const auto& o : raw) {
        if (!std::isfinite(o.value) || o.value < 0.0) {
            std::ostringstream msg;
            msg << "value " << o.value << " is not a finite non-negative real";
            throw ValidationError(msg.str());
        }
        if (!std::isfinite(o.prob) || o.prob <= 0.0 || o.prob > 1.0) {
            std::ostringstream msg;
            msg << "probability " << o.prob << " of value " << o.value << " is outside (0, 1]";
            throw ValidationError(msg.str());
        }
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
    std::vector<Outcome> merged;
    merged.reserve(raw.size());
    for (const auto& o : raw) {
        if (!merged.empty() && merged.back().value == o.value) {
            merged.back().prob += o.prob;
        } else {
            merged.push_back(o);
        }
    }
    double total = 0.0;
    for (const auto& o : merged) total += o.prob;
    if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "probabilities sum to " << total << ", not 1";
        throw ValidationError(msg.str());
    }
    for (auto& o : merged) o.prob /= total;
    return DiscreteDistribution(std::move(merged));
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
    return from_outcomes({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::two_point(double value, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("two-point probability must lie in [0, 1]");
    if (p == 1.0) return point_mass(value);
    if (value == 0.0 || p == 0.0) return point_mass(0.0);
    return from_outcomes({{0.0, 1.0 - p}, {value, p}});
}

double DiscreteDistribution::expectation() const {
    double acc = 0.0;
    for (const auto& o : outcomes_) acc += o.value * o.prob;
    return acc;
}

double DiscreteDistribution::prob_below(double x, bool strict) const {
    auto it = strict ? std::lower_bound(outcomes_.begin(), outcomes_.end(), x,
                                        [](const Outcome& o, double v) { return o.value < v; })
                     : std::upper_bound(outcomes_.begin(), outcomes_.end(), x,
                                        [](double v, const Outcome& o) { return v < o.value; });
    const auto count = static_cast<std::size_t>(it - outcomes_.begin());
    return count == 0 ? 0.0 : cdf_[count - 1];
}

double DiscreteDistribution::mass_at(double x) const {
    auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), x,
                               [](const Outcome& o, double v) { return o.value < v; });
    return (it != outcomes_.end() && it->value == x) ? it->prob : 0.0;
}

double DiscreteDistribution::quantile_draw(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return outcomes_[static_cast<std::size_t>(it - cdf_.begin())].value;
}

double expectation(const DiscreteDistribution& dist) { return dist.expectation(); }

double prob_below(const DiscreteDistribution& dist, double x, bool strict) {
    return dist.prob_below(x, strict);
}

}  // namespace prophet
