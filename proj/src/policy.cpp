#include "prophet/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace prophet {

class PolicyImpl : public std::enable_shared_from_this<PolicyImpl> {
public:
    PolicyImpl(Policy::Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
    virtual ~PolicyImpl() = default;

    virtual bool order_aware() const { return false; }
    virtual const Order* bound_order() const { return nullptr; }
    virtual bool decide(const DecisionContext& ctx) const = 0;

    // Default plan: rebuild the context per call.
    virtual std::vector<StepRule> plan(const Order& order) const {
        auto shared_order = std::make_shared<const Order>(order);
        auto self = shared_from_this();
        std::vector<StepRule> rules;
        rules.reserve(order.size());
        for (std::size_t t = 0; t < order.size(); ++t) {
            rules.emplace_back([self, shared_order, t](double value, double prefix_max) {
                DecisionContext ctx{t, value, prefix_max, shared_order->after(t),
                                    self->order_aware() ? shared_order.get() : nullptr};
                return self->decide(ctx);
            });
        }
        return rules;
    }

    Policy::Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

protected:
    void require_bound(const Order& order) const {
        if (!bound_order() || !(*bound_order() == order)) {
            throw std::invalid_argument(name_ + " was built for a different arrival order");
        }
    }

private:
    Policy::Kind kind_;
    std::string name_;
};

namespace {

// Suffix laws after each position, built back to front.
template <typename Visit>
void for_each_suffix(const Instance& instance, const Order& order, Visit&& visit) {
    auto suffix = SuffixMaxDistribution::empty();
    for (std::size_t t = order.size(); t-- > 0;) {
        visit(t, suffix);
        suffix = suffix.with_box(instance.box(order[t]));
    }
}

std::size_t atom_index(const DiscreteDistribution& box, double value) {
    const auto outs = box.outcomes();
    auto it = std::lower_bound(outs.begin(), outs.end(), value,
                               [](const Outcome& o, double v) { return o.value < v; });
    if (it == outs.end() || it->value != value) return outs.size();
    return static_cast<std::size_t>(it - outs.begin());
}

class GoldenPolicy final : public PolicyImpl {
public:
    explicit GoldenPolicy(Instance instance) : PolicyImpl(Policy::Kind::golden, "golden"), instance_(std::move(instance)) {}

    bool decide(const DecisionContext& ctx) const override { return golden_decide(instance_, ctx); }

    std::vector<StepRule> plan(const Order& order) const override {
        std::vector<StepRule> rules(order.size());
        for_each_suffix(instance_, order, [&](std::size_t t, const SuffixMaxDistribution& suffix) {
            const double tau = threshold_triple(suffix).tau;
            rules[t] = [tau](double value, double) { return value >= tau; };
        });
        return rules;
    }

private:
    Instance instance_;
};

class MaxProbPolicy final : public PolicyImpl {
public:
    MaxProbPolicy(Instance instance, MaxProbConfig cfg)
        : PolicyImpl(Policy::Kind::maxprob, "maxprob"), instance_(std::move(instance)), cfg_(cfg) {}

    bool decide(const DecisionContext& ctx) const override { return maxprob_decide(instance_, ctx, cfg_); }

    std::vector<StepRule> plan(const Order& order) const override {
        std::vector<StepRule> rules(order.size());
        const double bar = constants().lambda - cfg_.lambda_slack;
        const double baseline = cfg_.baseline;
        auto shared_order = std::make_shared<const Order>(order);
        auto self = std::static_pointer_cast<const MaxProbPolicy>(shared_from_this());
        for_each_suffix(instance_, order, [&](std::size_t t, const SuffixMaxDistribution& suffix) {
            const DiscreteDistribution& box = instance_.box(order[t]);
            std::vector<double> below;  // P[every later box < atom], per atom of the arriving box
            below.reserve(box.size());
            for (const auto& o : box.outcomes()) below.push_back(suffix.prob_below(o.value, true));
            rules[t] = [self, shared_order, t, bar, baseline, below = std::move(below)](double value,
                                                                                        double prefix_max) {
                if (!(value > std::max(prefix_max, baseline))) return false;
                const DiscreteDistribution& arriving = self->instance_.box((*shared_order)[t]);
                const std::size_t k = atom_index(arriving, value);
                if (k < below.size()) return below[k] >= bar;
                return SuffixMaxDistribution::of(self->instance_, shared_order->after(t)).prob_below(value, true) >= bar;
            };
        });
        return rules;
    }

private:
    Instance instance_;
    MaxProbConfig cfg_;
};

class OptExpectationPolicy final : public PolicyImpl {
public:
    OptExpectationPolicy(const Instance& instance, Order order)
        : PolicyImpl(Policy::Kind::opt_expectation, "opt-exp"),
          order_(std::move(order)),
          thresholds_(opt_expectation_thresholds(instance, order_)) {}

    bool order_aware() const override { return true; }
    const Order* bound_order() const override { return &order_; }

    bool decide(const DecisionContext& ctx) const override {
        if (ctx.full_order && !(*ctx.full_order == order_)) {
            throw std::invalid_argument("opt-exp was built for a different arrival order");
        }
        return ctx.current_value >= thresholds_.at(ctx.position);
    }

    std::vector<StepRule> plan(const Order& order) const override {
        require_bound(order);
        std::vector<StepRule> rules;
        rules.reserve(thresholds_.size());
        for (double tau : thresholds_) rules.emplace_back([tau](double value, double) { return value >= tau; });
        return rules;
    }

private:
    Order order_;
    std::vector<double> thresholds_;
};

class OptMaxProbPolicy final : public PolicyImpl {
public:
    OptMaxProbPolicy(const Instance& instance, Order order, const MaxProbConfig& cfg, std::size_t state_cap)
        : PolicyImpl(Policy::Kind::opt_maxprob, "opt-maxprob"),
          instance_(instance),
          order_(std::move(order)),
          table_(std::make_shared<const MaxProbTable>(opt_maxprob_table(instance, order_, cfg, state_cap))) {}

    bool order_aware() const override { return true; }
    const Order* bound_order() const override { return &order_; }

    bool decide(const DecisionContext& ctx) const override {
        if (ctx.full_order && !(*ctx.full_order == order_)) {
            throw std::invalid_argument("opt-maxprob was built for a different arrival order");
        }
        const auto& box = instance_.box(order_[ctx.position]);
        const std::size_t k = atom_index(box, ctx.current_value);
        if (k == box.size()) throw std::invalid_argument("value is not in the support of the arriving box");
        return table_->accept(ctx.position, k, ctx.current_value, ctx.prefix_max);
    }

    std::vector<StepRule> plan(const Order& order) const override {
        require_bound(order);
        std::vector<StepRule> rules;
        rules.reserve(order.size());
        auto self = std::static_pointer_cast<const OptMaxProbPolicy>(shared_from_this());
        for (std::size_t t = 0; t < order.size(); ++t) {
            rules.emplace_back([self, t](double value, double prefix_max) {
                const auto& box = self->instance_.box(self->order_[t]);
                const std::size_t k = atom_index(box, value);
                if (k == box.size()) throw std::invalid_argument("value is not in the support of the arriving box");
                return self->table_->accept(t, k, value, prefix_max);
            });
        }
        return rules;
    }

private:
    Instance instance_;
    Order order_;
    std::shared_ptr<const MaxProbTable> table_;
};

class ThresholdPolicy final : public PolicyImpl {
public:
    ThresholdPolicy(double threshold, std::string name)
        : PolicyImpl(Policy::Kind::single_threshold, std::move(name)), threshold_(threshold) {}

    bool decide(const DecisionContext& ctx) const override { return ctx.current_value >= threshold_; }

    std::vector<StepRule> plan(const Order& order) const override {
        const double threshold = threshold_;
        return std::vector<StepRule>(order.size(), [threshold](double value, double) { return value >= threshold; });
    }

private:
    double threshold_;
};

class CustomPolicy final : public PolicyImpl {
public:
    CustomPolicy(std::string name, bool order_aware, std::function<bool(const DecisionContext&)> fn)
        : PolicyImpl(Policy::Kind::custom, std::move(name)), order_aware_(order_aware), fn_(std::move(fn)) {}

    bool order_aware() const override { return order_aware_; }
    bool decide(const DecisionContext& ctx) const override { return fn_(ctx); }

private:
    bool order_aware_;
    std::function<bool(const DecisionContext&)> fn_;
};

double parse_number(std::string_view text, std::string_view what) {
    double out = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return out;
}

}  // namespace

Policy Policy::golden(const Instance& instance) { return Policy(std::make_shared<GoldenPolicy>(instance)); }

Policy Policy::maxprob(const Instance& instance, MaxProbConfig cfg) {
    return Policy(std::make_shared<MaxProbPolicy>(instance, cfg));
}

Policy Policy::opt_expectation(const Instance& instance, const Order& order) {
    return Policy(std::make_shared<OptExpectationPolicy>(instance, order));
}

Policy Policy::opt_maxprob(const Instance& instance, const Order& order, MaxProbConfig cfg, std::size_t state_cap) {
    return Policy(std::make_shared<OptMaxProbPolicy>(instance, order, cfg, state_cap));
}

Policy Policy::single_threshold(double threshold, std::string name) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
    if (name.empty()) name = "threshold";
    return Policy(std::make_shared<ThresholdPolicy>(threshold, std::move(name)));
}

Policy Policy::custom(std::string name, bool order_aware, std::function<bool(const DecisionContext&)> decide) {
    return Policy(std::make_shared<CustomPolicy>(std::move(name), order_aware, std::move(decide)));
}

Policy::Kind Policy::kind() const { return impl_->kind(); }
const std::string& Policy::name() const { return impl_->name(); }
bool Policy::order_aware() const { return impl_->order_aware(); }
const Order* Policy::bound_order() const { return impl_->bound_order(); }
bool Policy::decide(const DecisionContext& ctx) const { return impl_->decide(ctx); }
std::vector<StepRule> Policy::plan(const Order& order) const { return impl_->plan(order); }

Policy single_threshold_policy(double threshold) { return Policy::single_threshold(threshold); }

bool golden_decide(const Instance& instance, const DecisionContext& ctx) {
    const double tau = threshold_triple(suffix_max(instance, ctx.remaining)).tau;
    return ctx.current_value >= tau;
}

bool maxprob_decide(const Instance& instance, const DecisionContext& ctx, const MaxProbConfig& cfg) {
    if (!(ctx.current_value > std::max(ctx.prefix_max, cfg.baseline))) return false;
    const double below = suffix_max(instance, ctx.remaining).prob_below(ctx.current_value, true);
    return below >= constants().lambda - cfg.lambda_slack;
}

std::vector<double> opt_expectation_thresholds(const Instance& instance, const Order& order) {
    std::vector<double> tau(order.size(), 0.0);
    for (std::size_t t = order.size() - 1; t-- > 0;) {
        const double next = tau[t + 1];
        double acc = 0.0;
        for (const auto& o : instance.box(order[t + 1]).outcomes()) acc += o.prob * std::max(o.value, next);
        tau[t] = acc;
    }
    return tau;
}

std::size_t MaxProbTable::state_index(double prefix_max) const {
    if (prefix_max <= baseline) return 0;
    auto it = std::lower_bound(states.begin() + 1, states.end(), prefix_max);
    if (it == states.end() || *it != prefix_max) {
        throw std::invalid_argument("prefix maximum is not a reachable DP state");
    }
    return static_cast<std::size_t>(it - states.begin());
}

bool MaxProbTable::accept(std::size_t position, std::size_t atom, double value_at_atom, double prefix_max) const {
    const std::size_t s = state_index(prefix_max);
    const bool fresh = value_at_atom > states[s];
    const double take = fresh ? payoff[position][atom] : 0.0;
    const double keep = value[position + 1][fresh ? state_index(value_at_atom) : s];
    return take >= keep;
}

MaxProbTable opt_maxprob_table(const Instance& instance, const Order& order, const MaxProbConfig& cfg,
                               std::size_t state_cap) {
    const ValidationReport report = validate_instance(instance, true, cfg.baseline);
    if (!report.valid()) throw ValidationError("unique-max validation failed: " + report.summary());

    MaxProbTable table;
    table.baseline = cfg.baseline;
    table.states.push_back(cfg.baseline);
    for (double v : instance.support_union()) {
        if (v > cfg.baseline) table.states.push_back(v);
    }
    const std::size_t n = order.size();
    const std::size_t s_count = table.states.size();
    if (s_count > state_cap / (n + 1)) {
        throw CapExceeded("opt-maxprob DP needs " + std::to_string(s_count) + " x " + std::to_string(n + 1) +
                          " states, above the cap of " + std::to_string(state_cap));
    }

    table.value.assign(n + 1, std::vector<double>(s_count, 0.0));
    table.payoff.resize(n);
    for_each_suffix(instance, order, [&](std::size_t t, const SuffixMaxDistribution& suffix) {
        const auto outs = instance.box(order[t]).outcomes();
        auto& pay = table.payoff[t];
        std::vector<std::size_t> fresh_state(outs.size(), 0);
        for (std::size_t k = 0; k < outs.size(); ++k) {
            pay.push_back(suffix.prob_below(outs[k].value, true));
            if (outs[k].value > cfg.baseline) fresh_state[k] = table.state_index(outs[k].value);
        }
        const auto& next = table.value[t + 1];
        auto& row = table.value[t];
        for (std::size_t s = 0; s < s_count; ++s) {
            double acc = 0.0;
            for (std::size_t k = 0; k < outs.size(); ++k) {
                const bool fresh = outs[k].value > table.states[s];
                const double take = fresh ? pay[k] : 0.0;
                const double keep = next[fresh ? fresh_state[k] : s];
                acc += outs[k].prob * std::max(take, keep);
            }
            row[s] = acc;
        }
    });
    table.opt = table.value[0][0];
    return table;
}

PolicySpec parse_policy_spec(std::string_view text) {
    PolicySpec spec;
    spec.text = std::string(text);
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const bool has_arg = colon != std::string_view::npos;

    const auto no_arg = [&](PolicySpec::Kind kind) {
        if (has_arg) throw std::invalid_argument("policy '" + std::string(head) + "' takes no parameter");
        spec.kind = kind;
    };

    if (head == "golden") {
        no_arg(PolicySpec::Kind::golden);
    } else if (head == "maxprob" || head == "opt-maxprob") {
        spec.kind = head == "maxprob" ? PolicySpec::Kind::maxprob : PolicySpec::Kind::opt_maxprob;
        spec.parameter = has_arg ? parse_number(arg, "baseline") : 0.0;
        if (!std::isfinite(spec.parameter) || spec.parameter < 0.0) {
            throw std::invalid_argument("baseline must be a finite non-negative number");
        }
    } else if (head == "opt-exp") {
        no_arg(PolicySpec::Kind::opt_exp);
    } else if (head == "threshold") {
        if (!has_arg) throw std::invalid_argument("threshold policy needs a value, e.g. threshold:1.5");
        spec.kind = PolicySpec::Kind::threshold;
        spec.parameter = parse_number(arg, "threshold");
        if (!(spec.parameter >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
    } else if (head == "median") {
        no_arg(PolicySpec::Kind::median);
    } else if (head == "half-emax") {
        no_arg(PolicySpec::Kind::half_emax);
    } else if (head == "inv-e") {
        no_arg(PolicySpec::Kind::inv_e);
    } else {
        throw std::invalid_argument("unknown policy '" + std::string(text) + "'");
    }
    return spec;
}

Policy make_policy(const PolicySpec& spec, const Instance& instance, const Order* order, double lambda_slack) {
    using K = PolicySpec::Kind;
    if (spec.order_aware() && !order) {
        throw std::invalid_argument("policy '" + spec.text + "' is order-aware and needs an order");
    }
    switch (spec.kind) {
        case K::golden: return Policy::golden(instance);
        case K::maxprob: return Policy::maxprob(instance, {spec.parameter, lambda_slack});
        case K::opt_exp: return Policy::opt_expectation(instance, *order);
        case K::opt_maxprob: return Policy::opt_maxprob(instance, *order, {spec.parameter, lambda_slack});
        case K::threshold: return Policy::single_threshold(spec.parameter, spec.text);
        case K::median: return Policy::single_threshold(classic_thresholds(instance).median_of_max, "median");
        case K::half_emax: return Policy::single_threshold(classic_thresholds(instance).half_expected_max, "half-emax");
        case K::inv_e: return Policy::single_threshold(classic_thresholds(instance).inv_e_quantile, "inv-e");
    }
    throw std::logic_error("unhandled policy kind");
}

}  // namespace prophet
