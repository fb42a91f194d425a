#include "prophet/families.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "prophet/thresholds.hpp"

namespace prophet {

namespace {

std::string label(const char* prefix, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.6f", prefix, x);
    return buf;
}

double curve_ratio(double alpha) {
    return single_threshold_alg(alpha) / single_threshold_opt(alpha);
}

}  // namespace

const Order& FamilyInstance::order(const std::string& name) const {
    for (const auto& [key, order] : canonical_orders) {
        if (key == name) return order;
    }
    throw std::out_of_range("family " + family + " has no order named " + name);
}

FamilyInstance example1(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("example1 needs 0 < eps < 1");
    Instance instance({DiscreteDistribution::point_mass(std::numbers::sqrt2),
                       DiscreteDistribution::point_mass(1.0),
                       DiscreteDistribution::two_point(1.0 / eps, eps)});
    FamilyInstance f{"example1", instance, {}, {}, 1.0 / std::numbers::sqrt2, "1/sqrt(2) as eps -> 0"};
    f.canonical_orders.emplace_back("order_a", Order({0, 2, 1}, 3));
    f.canonical_orders.emplace_back("order_b", Order({0, 1, 2}, 3));
    f.parameters["eps"] = eps;
    return f;
}

FamilyInstance golden_lb(double eps, double step) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("golden-lb needs 0 < eps < 1");
    if (!(step > 0.0)) throw std::invalid_argument("golden-lb needs step > 0");
    const double span = kPhi - 1.0;
    const auto k = static_cast<std::size_t>(std::max(1.0, std::round(span / step)));
    const double grid_step = span / static_cast<double>(k);

    std::vector<DiscreteDistribution> boxes;
    for (std::size_t i = 0; i <= k; ++i) {
        const double x = i == k ? 1.0 : kPhi - static_cast<double>(i) * grid_step;
        boxes.push_back(DiscreteDistribution::point_mass(x));
    }
    const BoxId hv = boxes.size();
    boxes.push_back(DiscreteDistribution::two_point(1.0 / eps, eps));
    const std::size_t n = boxes.size();

    FamilyInstance f{"golden-lb", Instance(std::move(boxes)), {}, {}, 1.0 / kPhi, "1/phi as eps, step -> 0"};
    std::vector<BoxId> descending(k + 1);
    for (std::size_t i = 0; i <= k; ++i) descending[i] = i;

    std::vector<BoxId> pi = descending;
    pi.push_back(hv);
    f.canonical_orders.emplace_back("pi", Order(pi, n));
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<BoxId> seq(descending.begin(), descending.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        seq.push_back(hv);
        seq.insert(seq.end(), descending.begin() + static_cast<std::ptrdiff_t>(i) + 1, descending.end());
        f.canonical_orders.emplace_back(label("pi_x=", f.instance.box(i).min_value()), Order(seq, n));
    }
    f.parameters["eps"] = eps;
    f.parameters["step"] = grid_step;
    f.parameters["requested_step"] = step;
    f.parameters["deterministic_boxes"] = static_cast<double>(k + 1);
    return f;
}

FamilyInstance maxprob_lb(std::size_t n) {
    if (n < 2) throw std::invalid_argument("maxprob-lb needs n >= 2");
    const double lambda = constants().lambda;
    // 1 - eps = lambda^(1/n)
    const double eps = -std::expm1(std::log(lambda) / static_cast<double>(n));

    std::vector<DiscreteDistribution> boxes;
    boxes.push_back(DiscreteDistribution::point_mass(0.5));
    for (std::size_t i = 1; i <= n; ++i) boxes.push_back(DiscreteDistribution::two_point(static_cast<double>(i), eps));

    FamilyInstance f{"maxprob-lb", Instance(std::move(boxes)), {}, {}, constants().ln_inv_lambda,
                     "ln(1/lambda) as n -> infinity"};
    std::vector<BoxId> decreasing{0};
    std::vector<BoxId> increasing{0};
    for (std::size_t i = 1; i <= n; ++i) {
        decreasing.push_back(n + 1 - i);
        increasing.push_back(i);
    }
    f.canonical_orders.emplace_back("decreasing", Order(decreasing, n + 1));
    f.canonical_orders.emplace_back("increasing", Order(increasing, n + 1));
    f.parameters["n"] = static_cast<double>(n);
    f.parameters["eps"] = eps;
    return f;
}

PeriodSizes single_threshold_periods(std::size_t n, std::size_t T) {
    if (T < 1 || T > n) throw std::invalid_argument("single-threshold family needs 1 <= T <= n");
    const std::size_t m = (n - T) / 2;
    return {m, n - T - m + 1, T - 1};
}

FamilyInstance single_threshold_family(std::size_t n, std::size_t T) {
    const PeriodSizes periods = single_threshold_periods(n, T);
    const double p = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<DiscreteDistribution> boxes;
    boxes.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) boxes.push_back(DiscreteDistribution::two_point(static_cast<double>(i), p));

    // position i holds box T+i, then n+m-i, then n-i; box k has id k-1
    const std::size_t m = periods.first;
    std::vector<BoxId> seq;
    seq.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t box;
        if (i < m) {
            box = T + i;
        } else if (i <= n - T) {
            box = n + m - i;
        } else {
            box = n - i;
        }
        seq.push_back(box - 1);
    }

    FamilyInstance f{"single-threshold", Instance(std::move(boxes)), {}, {}, 0.0, ""};
    f.canonical_orders.emplace_back("three_period", Order(std::move(seq), n));
    const double alpha = static_cast<double>(n - T) / std::sqrt(static_cast<double>(n));
    f.parameters["n"] = static_cast<double>(n);
    f.parameters["T"] = static_cast<double>(T);
    f.parameters["p"] = p;
    f.parameters["alpha"] = alpha;
    f.predicted_limit = single_threshold_alg(alpha);
    f.limit_note = "large-n win probability of threshold T";
    return f;
}

std::size_t threshold_for_alpha(std::size_t n, double alpha) {
    const double t = static_cast<double>(n) - alpha * std::sqrt(static_cast<double>(n));
    return static_cast<std::size_t>(std::clamp(std::round(t), 1.0, static_cast<double>(n)));
}

double single_threshold_alg(double alpha) {
    return alpha / 2.0 * std::exp(-alpha) + std::exp(-alpha / 2.0) - std::exp(-alpha);
}

double single_threshold_opt(double alpha) { return 1.0 - std::exp(-alpha / 2.0) + std::exp(-alpha); }

SingleThresholdReport single_threshold_ratio_curve(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("alpha grid is empty");
    SingleThresholdReport report;
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i];
        if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
        const double alg = single_threshold_alg(a);
        const double opt = single_threshold_opt(a);
        report.alpha_grid.push_back({a, alg, opt, alg / opt});
        if (report.alpha_grid[i].ratio > report.alpha_grid[best].ratio) best = i;
    }

    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());
    const auto pos = std::lower_bound(sorted.begin(), sorted.end(), grid[best]) - sorted.begin();
    double lo = sorted[static_cast<std::size_t>(std::max<std::ptrdiff_t>(pos - 1, 0))];
    double hi = sorted[static_cast<std::size_t>(std::min<std::ptrdiff_t>(pos + 1, std::ssize(sorted) - 1))];

    const double inv_phi = 1.0 / kPhi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = curve_ratio(x1);
    double f2 = curve_ratio(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = curve_ratio(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = curve_ratio(x1);
        }
    }
    const double refined = 0.5 * (lo + hi);
    if (curve_ratio(refined) >= report.alpha_grid[best].ratio) {
        report.alpha_star = refined;
        report.max_ratio = curve_ratio(refined);
    } else {
        report.alpha_star = grid[best];
        report.max_ratio = report.alpha_grid[best].ratio;
    }
    return report;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(i / 100.0);
    return grid;
}

}  // namespace prophet
