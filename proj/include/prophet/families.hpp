#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "prophet/instance.hpp"

namespace prophet {

/// A generated worst-case instance plus the arrival orders that expose it.
///
/// `predicted_limit` is the limiting ratio as the family parameter goes to its
/// limit. Finite-parameter ratios are only ever compared to it with an
/// explicit tolerance.
struct FamilyInstance {
    std::string family;
    Instance instance;
    std::vector<std::pair<std::string, Order>> canonical_orders;
    std::map<std::string, double> parameters;
    double predicted_limit = 0.0;
    std::string limit_note;

    const Order& order(const std::string& name) const;
};

/// Boxes {sqrt 2}, {1}, {1/eps w.p. eps}; orders (sqrt2, HV, 1) and (sqrt2, 1, HV).
FamilyInstance example1(double eps);

/// Deterministic boxes phi, phi - s, ..., 1 (s rounded so both endpoints are
/// hit) and a high-variance box 1/eps w.p. eps. Orders: "pi" (descending, then
/// HV) and one "pi_x" per deterministic x > 1 with HV moved right after x.
FamilyInstance golden_lb(double eps, double step);

/// Deterministic 1/2, then box i in 1..n worth i w.p. eps with (1 - eps)^n = lambda.
/// Orders "decreasing" (1/2, n, ..., 1) and "increasing" (1/2, 1, ..., n).
FamilyInstance maxprob_lb(std::size_t n);

/// Box i (id i-1) worth i w.p. 1/sqrt(n); single order in three periods:
/// T..T+m-1 ascending, n..T+m descending, T-1..1 descending, m = floor((n-T)/2).
FamilyInstance single_threshold_family(std::size_t n, std::size_t T);

struct PeriodSizes {
    std::size_t first = 0;
    std::size_t second = 0;
    std::size_t third = 0;
};

PeriodSizes single_threshold_periods(std::size_t n, std::size_t T);

/// Nearest integer threshold with (n - T) / sqrt(n) close to alpha, clamped to [1, n].
std::size_t threshold_for_alpha(std::size_t n, double alpha);

/// Large-n win probability of the threshold rule: (a/2)e^(-a) + e^(-a/2) - e^(-a).
double single_threshold_alg(double alpha);
/// Large-n lower bound on the order-aware optimum: 1 - e^(-a/2) + e^(-a).
double single_threshold_opt(double alpha);

struct SingleThresholdPoint {
    double alpha = 0.0;
    double alg = 0.0;
    double opt = 0.0;
    double ratio = 0.0;
};

struct SingleThresholdReport {
    std::vector<SingleThresholdPoint> alpha_grid;
    double alpha_star = 0.0;
    double max_ratio = 0.0;
};

/// Evaluates the closed forms on `grid` and refines the best grid point by
/// golden-section search to 1e-9 in alpha.
SingleThresholdReport single_threshold_ratio_curve(const std::vector<double>& grid);

/// 0, 0.01, ..., 4.
std::vector<double> default_alpha_grid();

}  // namespace prophet
