#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include "prophet/instance.hpp"
#include "prophet/policy.hpp"

namespace prophet {

/// Expected accepted value, or probability of accepting the unique value that
/// exceeds the baseline and every other realized value.
struct Objective {
    enum class Kind { expectation, winprob };

    Kind kind = Kind::expectation;
    double baseline = 0.0;  // winprob only

    static Objective expectation() { return {}; }
    static Objective winprob(double baseline = 0.0) { return {Kind::winprob, baseline}; }

    /// expectation | winprob[:theta]
    static Objective parse(std::string_view text);
    std::string to_string() const;
};

struct EvalResult {
    enum class Method { exact_dp, brute_force, monte_carlo };

    double value = 0.0;
    Method method = Method::exact_dp;
    std::optional<std::uint64_t> samples;
    std::optional<double> std_error;
};

std::string to_string(EvalResult::Method method);

struct EvalLimits {
    std::size_t state_cap = 50'000'000;   // prefix states x positions for the exact DP
    std::size_t profile_cap = 1'000'000;  // profiles enumerated by brute_force
    std::size_t permutation_cap = 8;      // boxes for a full order sweep
    unsigned threads = 0;                 // 0 = hardware concurrency
};

/// Forward DP over (position, prefix maximum). Exact for any policy whose
/// decision depends only on (position, value, prefix maximum, remaining set).
EvalResult eval_exact(const Instance& instance, const Order& order, const Policy& policy,
                      const Objective& objective, const EvalLimits& limits = {});

/// Enumerates every value profile and simulates the policy on each.
EvalResult brute_force(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, const EvalLimits& limits = {});

/// Mean over `samples` sampled profiles with its standard error. Each sample
/// draws from its own seed derived from `seed`, so the estimate does not
/// depend on the thread count.
EvalResult monte_carlo(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, std::uint64_t samples, std::uint64_t seed,
                       const EvalLimits& limits = {});

/// Realized score of one run on a fixed profile.
double simulate(const Instance& instance, const Order& order, std::span<const StepRule> rules,
                const ValueProfile& profile, const Objective& objective);

enum class BenchmarkKind { opt_expectation, opt_maxprob };

/// The order-aware optimum matching an objective.
BenchmarkKind benchmark_for(const Objective& objective);

struct OrderRatio {
    Order order;
    double alg = 0.0;
    double opt = 0.0;
    double ratio = 1.0;
    bool degenerate = false;  // opt == 0, ratio recorded as 1
};

struct RatioReport {
    std::vector<OrderRatio> per_order;
    double min_ratio = 1.0;
    std::size_t argmin = 0;

    const Order& argmin_order() const { return per_order.at(argmin).order; }
};

/// ALG(pi) / OPT(pi) for one order, OPT rebuilt for that order.
OrderRatio order_ratio(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, BenchmarkKind benchmark, const EvalLimits& limits = {});

/// Ratio for every listed order. Runs in parallel; the report is independent of scheduling
/// and ties for the minimum resolve to the earliest order.
RatioReport order_ratio_sweep(const Instance& instance, const std::vector<Order>& orders, const Policy& policy,
                              const Objective& objective, BenchmarkKind benchmark, const EvalLimits& limits = {});

/// Same, over all n! orders in lexicographic order. Throws CapExceeded when
/// n > limits.permutation_cap.
RatioReport order_ratio_sweep(const Instance& instance, const Policy& policy, const Objective& objective,
                              BenchmarkKind benchmark, const EvalLimits& limits = {});

std::vector<Order> all_orders(std::size_t n);

/// One row per arrival position t (0-based): the golden policy's value on the
/// boxes after t against beta_t and alpha_t of those boxes.
struct SuffixAuditRow {
    std::size_t position = 0;
    double alg_suffix = 0.0;  // golden policy run on the boxes after `position`
    double beta = 0.0;
    double alpha = 0.0;
    bool alg_ge_beta = true;
    bool beta_ge_alpha_over_phi = true;

    bool passed() const { return alg_ge_beta && beta_ge_alpha_over_phi; }
};

std::vector<SuffixAuditRow> suffix_audit(const Instance& instance, const Order& order, double slack = 1e-9);

}  // namespace prophet
