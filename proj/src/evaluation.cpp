#include "prophet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace prophet {

namespace {

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, count) on a small pool. Callers write results by index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const unsigned workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void check_objective(const Instance& instance, const Objective& objective) {
    if (objective.kind != Objective::Kind::winprob) return;
    const ValidationReport report = validate_instance(instance, true, objective.baseline);
    if (!report.valid()) {
        throw ValidationError("winprob needs a unique maximum above the baseline: " + report.summary());
    }
}

double start_prefix(const Objective& objective) {
    return objective.kind == Objective::Kind::winprob ? objective.baseline : 0.0;
}

// below[t][k] = P[every box after position t < k-th atom of the box at t]
std::vector<std::vector<double>> future_below(const Instance& instance, const Order& order) {
    std::vector<std::vector<double>> below(order.size());
    auto suffix = SuffixMaxDistribution::empty();
    for (std::size_t t = order.size(); t-- > 0;) {
        const auto& box = instance.box(order[t]);
        for (const auto& o : box.outcomes()) below[t].push_back(suffix.prob_below(o.value, true));
        suffix = suffix.with_box(box);
    }
    return below;
}

// Running mean and sum of squared deviations, mergeable in a fixed order.
struct Moments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double total = static_cast<double>(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.count) / total;
        m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / total;
        count += other.count;
    }
};

}  // namespace

Objective Objective::parse(std::string_view text) {
    if (text == "expectation") return expectation();
    if (text == "winprob") return winprob();
    if (text.starts_with("winprob:")) {
        const std::string_view arg = text.substr(8);
        double theta = 0.0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), theta);
        if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(theta) || theta < 0.0) {
            throw std::invalid_argument("bad winprob baseline '" + std::string(arg) + "'");
        }
        return winprob(theta);
    }
    throw std::invalid_argument("unknown objective '" + std::string(text) + "'");
}

std::string Objective::to_string() const {
    if (kind == Kind::expectation) return "expectation";
    std::ostringstream out;
    out.precision(17);
    out << "winprob:" << baseline;
    return out.str();
}

std::string to_string(EvalResult::Method method) {
    switch (method) {
        case EvalResult::Method::exact_dp: return "exact-dp";
        case EvalResult::Method::brute_force: return "brute-force";
        case EvalResult::Method::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

EvalResult eval_exact(const Instance& instance, const Order& order, const Policy& policy,
                      const Objective& objective, const EvalLimits& limits) {
    check_objective(instance, objective);
    if (order.size() != instance.size()) throw ValidationError("order does not match instance size");

    const double p0 = start_prefix(objective);
    std::vector<double> states{p0};
    for (double v : instance.support_union()) {
        if (v > p0) states.push_back(v);
    }
    const std::size_t n = order.size();
    if (states.size() > limits.state_cap / n) {
        throw CapExceeded("exact evaluation needs " + std::to_string(states.size()) + " prefix states x " +
                          std::to_string(n) + " positions, above the cap of " + std::to_string(limits.state_cap) +
                          "; use Monte Carlo instead");
    }
    const auto state_of = [&](double v) {
        if (v <= p0) return std::size_t{0};
        return static_cast<std::size_t>(std::lower_bound(states.begin() + 1, states.end(), v) - states.begin());
    };

    const auto rules = policy.plan(order);
    const bool winprob = objective.kind == Objective::Kind::winprob;
    const auto below = winprob ? future_below(instance, order) : std::vector<std::vector<double>>{};

    std::vector<double> mass(states.size(), 0.0);
    std::vector<double> next(states.size(), 0.0);
    mass[0] = 1.0;
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto outs = instance.box(order[t]).outcomes();
        std::vector<std::size_t> atom_state(outs.size());
        for (std::size_t k = 0; k < outs.size(); ++k) atom_state[k] = state_of(outs[k].value);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (mass[s] == 0.0) continue;
            const double prefix = states[s];
            for (std::size_t k = 0; k < outs.size(); ++k) {
                const double m = mass[s] * outs[k].prob;
                const double v = outs[k].value;
                if (rules[t](v, prefix)) {
                    if (!winprob) {
                        total += m * v;
                    } else if (v > prefix) {
                        total += m * below[t][k];
                    }
                } else {
                    next[std::max(s, atom_state[k])] += m;
                }
            }
        }
        std::swap(mass, next);
    }
    return {total, EvalResult::Method::exact_dp, std::nullopt, std::nullopt};
}

double simulate(const Instance& instance, const Order& order, std::span<const StepRule> rules,
                const ValueProfile& profile, const Objective& objective) {
    double prefix = start_prefix(objective);
    for (std::size_t t = 0; t < order.size(); ++t) {
        const BoxId box = order[t];
        const double v = profile.values[box];
        if (rules[t](v, prefix)) {
            if (objective.kind == Objective::Kind::expectation) return v;
            if (!(v > objective.baseline)) return 0.0;
            for (BoxId other = 0; other < instance.size(); ++other) {
                if (other != box && !(profile.values[other] < v)) return 0.0;
            }
            return 1.0;
        }
        prefix = std::max(prefix, v);
    }
    return 0.0;
}

EvalResult brute_force(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, const EvalLimits& limits) {
    check_objective(instance, objective);
    const std::size_t count = instance.profile_count();
    if (count > limits.profile_cap) {
        throw CapExceeded("brute force would enumerate " + std::to_string(count) + " profiles, above the cap of " +
                          std::to_string(limits.profile_cap));
    }
    const auto rules = policy.plan(order);
    const std::size_t n = instance.size();
    std::vector<std::size_t> digit(n, 0);
    ValueProfile profile;
    profile.values.resize(n);
    double total = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
        double prob = 1.0;
        for (BoxId b = 0; b < n; ++b) {
            const Outcome& o = instance.box(b).outcomes()[digit[b]];
            profile.values[b] = o.value;
            prob *= o.prob;
        }
        total += prob * simulate(instance, order, rules, profile, objective);
        for (BoxId b = 0; b < n; ++b) {
            if (++digit[b] < instance.box(b).size()) break;
            digit[b] = 0;
        }
    }
    return {total, EvalResult::Method::brute_force, count, std::nullopt};
}

EvalResult monte_carlo(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, std::uint64_t samples, std::uint64_t seed,
                       const EvalLimits& limits) {
    if (samples == 0) throw std::invalid_argument("monte carlo needs at least one sample");
    check_objective(instance, objective);
    const auto rules = policy.plan(order);

    constexpr std::uint64_t kChunk = 1024;
    const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
    std::vector<Moments> partial(chunks);
    parallel_for(chunks, limits.threads, [&](std::size_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(samples, begin + kChunk);
        Moments m;
        for (std::uint64_t i = begin; i < end; ++i) {
            const ValueProfile profile = sample_profile(instance, derive_seed(seed, i));
            m.add(simulate(instance, order, rules, profile, objective));
        }
        partial[c] = m;
    });
    Moments all;
    for (const auto& m : partial) all.merge(m);
    const double variance = all.count > 1 ? all.m2 / static_cast<double>(all.count - 1) : 0.0;
    return {all.mean, EvalResult::Method::monte_carlo, samples,
            std::sqrt(std::max(variance, 0.0) / static_cast<double>(all.count))};
}

BenchmarkKind benchmark_for(const Objective& objective) {
    return objective.kind == Objective::Kind::expectation ? BenchmarkKind::opt_expectation
                                                          : BenchmarkKind::opt_maxprob;
}

OrderRatio order_ratio(const Instance& instance, const Order& order, const Policy& policy,
                       const Objective& objective, BenchmarkKind benchmark, const EvalLimits& limits) {
    OrderRatio row{order};
    row.alg = eval_exact(instance, order, policy, objective, limits).value;
    const Policy opt = benchmark == BenchmarkKind::opt_expectation
                           ? Policy::opt_expectation(instance, order)
                           : Policy::opt_maxprob(instance, order, {objective.baseline}, limits.state_cap);
    row.opt = eval_exact(instance, order, opt, objective, limits).value;
    if (row.opt <= 0.0) {
        row.degenerate = true;
        row.ratio = 1.0;
    } else {
        row.ratio = row.alg / row.opt;
    }
    return row;
}

RatioReport order_ratio_sweep(const Instance& instance, const std::vector<Order>& orders, const Policy& policy,
                              const Objective& objective, BenchmarkKind benchmark, const EvalLimits& limits) {
    if (policy.order_aware()) {
        throw std::invalid_argument("the order sweep evaluates order-unaware policies; '" + policy.name() +
                                    "' is order-aware");
    }
    if (orders.empty()) throw std::invalid_argument("no orders to sweep");
    RatioReport report;
    report.per_order.resize(orders.size(), OrderRatio{orders.front()});
    parallel_for(orders.size(), limits.threads, [&](std::size_t i) {
        report.per_order[i] = order_ratio(instance, orders[i], policy, objective, benchmark, limits);
    });
    report.min_ratio = report.per_order.front().ratio;
    report.argmin = 0;
    for (std::size_t i = 1; i < report.per_order.size(); ++i) {
        if (report.per_order[i].ratio < report.min_ratio) {
            report.min_ratio = report.per_order[i].ratio;
            report.argmin = i;
        }
    }
    return report;
}

RatioReport order_ratio_sweep(const Instance& instance, const Policy& policy, const Objective& objective,
                              BenchmarkKind benchmark, const EvalLimits& limits) {
    if (instance.size() > limits.permutation_cap) {
        throw CapExceeded(std::to_string(instance.size()) + " boxes exceed the permutation cap of " +
                          std::to_string(limits.permutation_cap) + "; pass an explicit order list");
    }
    return order_ratio_sweep(instance, all_orders(instance.size()), policy, objective, benchmark, limits);
}

std::vector<Order> all_orders(std::size_t n) {
    std::vector<BoxId> seq(n);
    for (std::size_t i = 0; i < n; ++i) seq[i] = i;
    std::vector<Order> orders;
    do {
        orders.emplace_back(seq, n);
    } while (std::next_permutation(seq.begin(), seq.end()));
    return orders;
}

std::vector<SuffixAuditRow> suffix_audit(const Instance& instance, const Order& order, double slack) {
    const std::size_t n = order.size();
    std::vector<SuffixAuditRow> rows(n);
    auto suffix = SuffixMaxDistribution::empty();
    double alg_after = 0.0;  // golden policy value on the boxes after t
    for (std::size_t t = n; t-- > 0;) {
        const ThresholdTriple triple = threshold_triple(suffix);
        SuffixAuditRow& row = rows[t];
        row.position = t;
        row.alg_suffix = alg_after;
        row.beta = triple.beta;
        row.alpha = triple.alpha;
        row.alg_ge_beta = row.alg_suffix >= row.beta - slack;
        row.beta_ge_alpha_over_phi = row.beta >= row.alpha / kPhi - slack;

        const auto& box = instance.box(order[t]);
        double alg_from = 0.0;
        for (const auto& o : box.outcomes()) alg_from += o.prob * (o.value >= triple.tau ? o.value : alg_after);
        alg_after = alg_from;
        suffix = suffix.with_box(box);
    }
    return rows;
}

}  // namespace prophet
