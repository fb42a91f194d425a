#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prophet/instance.hpp"
#include "prophet/thresholds.hpp"

namespace prophet {

/// What a stopping rule may look at when box `position` (0-based) arrives.
struct DecisionContext {
    std::size_t position = 0;
    double current_value = 0.0;
    double prefix_max = 0.0;              // max of the baseline and the values already seen
    std::span<const BoxId> remaining;     // boxes still to come
    const Order* full_order = nullptr;    // only order-aware policies read this
};

struct MaxProbConfig {
    double baseline = 0.0;
    // P[future < v] >= lambda is tested as P >= lambda - slack, so a product
    // that equals lambda mathematically is not lost to rounding.
    double lambda_slack = 1e-12;
};

/// Accept/reject for one position of a fixed order, given (value, prefix_max).
using StepRule = std::function<bool(double value, double prefix_max)>;

class PolicyImpl;

/// A deterministic stopping rule. Cheap to copy; immutable after construction.
class Policy {
public:
    enum class Kind { golden, maxprob, opt_expectation, opt_maxprob, single_threshold, custom };

    /// Accept iff value >= max(alpha_t, beta_t) of the boxes still to come.
    static Policy golden(const Instance& instance);

    /// Accept iff value beats the running maximum and P[all remaining < value] >= lambda.
    static Policy maxprob(const Instance& instance, MaxProbConfig cfg = {});

    /// Backward-induction optimum for expected value, built for one order.
    static Policy opt_expectation(const Instance& instance, const Order& order);

    /// Optimal catch-the-maximum rule for one order (DP over the running maximum).
    static Policy opt_maxprob(const Instance& instance, const Order& order, MaxProbConfig cfg = {},
                              std::size_t state_cap = 50'000'000);

    /// Accept the first value >= threshold.
    static Policy single_threshold(double threshold, std::string name = {});

    static Policy custom(std::string name, bool order_aware,
                         std::function<bool(const DecisionContext&)> decide);

    Kind kind() const;
    const std::string& name() const;
    bool order_aware() const;

    /// The order an order-aware policy was built for; nullptr otherwise.
    const Order* bound_order() const;

    bool decide(const DecisionContext& ctx) const;

    /// One rule per arrival position of `order`, sharing precomputed suffix data.
    /// Throws std::invalid_argument if an order-aware policy is planned on a
    /// different order than the one it was built for.
    std::vector<StepRule> plan(const Order& order) const;

private:
    explicit Policy(std::shared_ptr<const PolicyImpl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const PolicyImpl> impl_;
};

bool golden_decide(const Instance& instance, const DecisionContext& ctx);
bool maxprob_decide(const Instance& instance, const DecisionContext& ctx, const MaxProbConfig& cfg = {});

/// tau*_t = E[max(v_{t+1}, tau*_{t+1})], tau*_{n-1} = 0, indexed by arrival position.
std::vector<double> opt_expectation_thresholds(const Instance& instance, const Order& order);

/// Win-probability DP for the order-aware catch-the-maximum benchmark.
struct MaxProbTable {
    double baseline = 0.0;
    std::vector<double> states;                // prefix-max values: baseline, then support values above it
    std::vector<std::vector<double>> value;    // value[t][s]: win prob from position t in state s; row n is zero
    std::vector<std::vector<double>> payoff;   // payoff[t][k]: win prob of accepting the k-th atom of box order[t] on a fresh maximum
    double opt = 0.0;                          // value[0][0]

    std::size_t state_index(double prefix_max) const;
    bool accept(std::size_t position, std::size_t atom, double value_at_atom, double prefix_max) const;
};

/// Throws ValidationError when the instance fails unique-max validation above
/// the baseline, CapExceeded when states x positions exceeds `state_cap`.
MaxProbTable opt_maxprob_table(const Instance& instance, const Order& order, const MaxProbConfig& cfg = {},
                               std::size_t state_cap = 50'000'000);

Policy single_threshold_policy(double threshold);

/// Parsed form of a CLI policy name.
struct PolicySpec {
    enum class Kind { golden, maxprob, opt_exp, opt_maxprob, threshold, median, half_emax, inv_e };

    Kind kind = Kind::golden;
    double parameter = 0.0;  // theta for maxprob kinds, T for threshold
    std::string text;

    bool order_aware() const { return kind == Kind::opt_exp || kind == Kind::opt_maxprob; }
};

/// golden | maxprob[:theta] | opt-exp | opt-maxprob[:theta] | threshold:<T> | median | half-emax | inv-e
/// Throws std::invalid_argument on anything else.
PolicySpec parse_policy_spec(std::string_view text);

/// Instantiates a spec on an instance. Order-aware kinds need `order`.
Policy make_policy(const PolicySpec& spec, const Instance& instance, const Order* order = nullptr,
                   double lambda_slack = MaxProbConfig{}.lambda_slack);

}  // namespace prophet
