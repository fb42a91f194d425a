#include "prophet/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace prophet {

namespace {

double lambda_residual(double x) { return x / (1.0 - x) - std::log(1.0 / x); }

// f(x) = E[(y - phi x)^+] - x, strictly decreasing.
double beta_gap(const SuffixMaxDistribution& dist, double x) {
    return expected_surplus(dist, kPhi * x) - x;
}

double beta_by_bisection(const SuffixMaxDistribution& dist) {
    double lo = 0.0;
    double hi = dist.distribution().max_value() / kPhi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (beta_gap(dist, mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(beta_gap(dist, lo)) < std::abs(beta_gap(dist, hi)) ? lo : hi;
}

}  // namespace

double solve_lambda() {
    double lo = 0.1;  // residual < 0
    double hi = 0.9;  // residual > 0
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (lambda_residual(mid) < 0.0 ? lo : hi) = mid;
    }
    return std::abs(lambda_residual(lo)) <= std::abs(lambda_residual(hi)) ? lo : hi;
}

const Constants& constants() {
    static const Constants c = [] {
        const double lambda = solve_lambda();
        return Constants{kPhi, 1.0 / kPhi, lambda, std::log(1.0 / lambda)};
    }();
    return c;
}

SuffixMaxDistribution SuffixMaxDistribution::of(std::span<const DiscreteDistribution> boxes) {
    SuffixMaxDistribution acc;
    for (const auto& box : boxes) acc = acc.with_box(box);
    return acc;
}

SuffixMaxDistribution SuffixMaxDistribution::of(const Instance& instance, std::span<const BoxId> ids) {
    SuffixMaxDistribution acc;
    for (BoxId id : ids) acc = acc.with_box(instance.box(id));
    return acc;
}

SuffixMaxDistribution SuffixMaxDistribution::with_box(const DiscreteDistribution& box) const {
    if (!dist_) return SuffixMaxDistribution(box);
    const auto a = dist_->outcomes();
    const auto b = box.outcomes();
    std::vector<double> points;
    points.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        double next;
        if (j == b.size() || (i < a.size() && a[i].value < b[j].value)) {
            next = a[i++].value;
        } else if (i == a.size() || b[j].value < a[i].value) {
            next = b[j++].value;
        } else {
            next = a[i].value;
            ++i;
            ++j;
        }
        points.push_back(next);
    }

    std::vector<Outcome> outcomes;
    std::vector<double> cdf;
    double previous = 0.0;
    for (double x : points) {
        const double f = dist_->prob_below(x, false) * box.prob_below(x, false);
        if (f > previous) {
            outcomes.push_back({x, f - previous});
            cdf.push_back(f);
            previous = f;
        }
    }
    return SuffixMaxDistribution(DiscreteDistribution(std::move(outcomes), std::move(cdf)));
}

double SuffixMaxDistribution::prob_below(double x, bool strict) const {
    // max of nothing is -infinity
    return dist_ ? dist_->prob_below(x, strict) : 1.0;
}

SuffixMaxDistribution suffix_max(const Instance& instance, std::span<const BoxId> ids) {
    return SuffixMaxDistribution::of(instance, ids);
}

double expected_surplus(const SuffixMaxDistribution& dist, double c) {
    if (dist.empty_set()) return 0.0;
    double acc = 0.0;
    for (const auto& o : dist.distribution().outcomes()) {
        if (o.value > c) acc += o.prob * (o.value - c);
    }
    return acc;
}

double solve_beta(const SuffixMaxDistribution& dist) {
    if (dist.empty_set()) return 0.0;
    const auto outs = dist.distribution().outcomes();
    const std::size_t m = outs.size();

    // tail_value[k] = sum_{i >= k} p_i c_i, tail_mass[k] = sum_{i >= k} p_i
    std::vector<double> tail_value(m + 1, 0.0);
    std::vector<double> tail_mass(m + 1, 0.0);
    for (std::size_t k = m; k-- > 0;) {
        tail_value[k] = tail_value[k + 1] + outs[k].prob * outs[k].value;
        tail_mass[k] = tail_mass[k + 1] + outs[k].prob;
    }

    // First breakpoint c_k / phi where the gap is non-positive; the root lies on
    // the segment just below it, where exactly the atoms i >= k are in the money.
    std::size_t k = 0;
    for (; k < m; ++k) {
        const double c = outs[k].value;
        const double gap = (tail_value[k + 1] - c * tail_mass[k + 1]) - c / kPhi;
        if (gap <= 0.0) break;
    }
    double beta = k < m ? tail_value[k] / (1.0 + kPhi * tail_mass[k]) : 0.0;

    if (std::abs(beta_gap(dist, beta)) > 1e-10) beta = beta_by_bisection(dist);
    return beta;
}

ThresholdTriple threshold_triple(const SuffixMaxDistribution& dist) {
    ThresholdTriple t;
    t.alpha = dist.expectation() / kPhi;
    t.beta = solve_beta(dist);
    t.tau = std::max(t.alpha, t.beta);
    return t;
}

ClassicThresholds classic_thresholds(const Instance& instance) {
    std::vector<BoxId> all(instance.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto max_law = suffix_max(instance, all);

    const auto lowest_quantile = [&](double level) {
        for (const auto& o : max_law.distribution().outcomes()) {
            if (max_law.prob_below(o.value, false) >= level) return o.value;
        }
        return max_law.distribution().max_value();
    };

    ClassicThresholds t;
    t.median_of_max = lowest_quantile(0.5);
    t.half_expected_max = max_law.expectation() / 2.0;
    t.inv_e_quantile = lowest_quantile(1.0 / std::numbers::e);
    return t;
}

}  // namespace prophet
