#include <doctest.h>

#include <cmath>
#include <random>

#include "prophet/evaluation.hpp"
#include "prophet/families.hpp"
#include "support/oracles.hpp"

using namespace prophet;
namespace t = prophet::testing;

namespace {

Instance coin_and_one() {
    return Instance({DiscreteDistribution::from_outcomes({{0.0, 0.5}, {2.0, 0.5}}), DiscreteDistribution::point_mass(1.0)});
}

}  // namespace

TEST_CASE("exact evaluation on small instances") {
    const auto inst = coin_and_one();
    const Order order = Order::identity(2);
    // Golden: tau_0 = 1/phi, so take 2 when it shows, else the sure 1.
    const auto golden = eval_exact(inst, order, Policy::golden(inst), Objective::expectation());
    CHECK(golden.value == doctest::Approx(1.5));
    CHECK(golden.method == EvalResult::Method::exact_dp);
    CHECK(eval_exact(inst, order, Policy::opt_expectation(inst, order), Objective::expectation()).value ==
          doctest::Approx(1.5));
    // Catching the max: accepting 2 always wins, the 1 wins when the coin is 0.
    CHECK(eval_exact(inst, order, Policy::maxprob(inst), Objective::winprob()).value == doctest::Approx(1.0));
    // Threshold 1.5 misses the sure 1.
    CHECK(eval_exact(inst, order, Policy::single_threshold(1.5), Objective::expectation()).value ==
          doctest::Approx(1.0));
    CHECK(eval_exact(inst, order, Policy::single_threshold(1.5), Objective::winprob()).value ==
          doctest::Approx(0.5));
}

TEST_CASE("brute force enumerates every profile") {
    const Instance inst({DiscreteDistribution::from_outcomes({{1.0, 0.5}, {4.0, 0.5}}),
                         DiscreteDistribution::from_outcomes({{2.0, 0.2}, {3.0, 0.3}, {5.0, 0.5}}),
                         DiscreteDistribution::from_outcomes({{0.0, 0.5}, {6.0, 0.5}})});
    CHECK(inst.profile_count() == 12);
    const Order order({2, 0, 1}, 3);
    const auto policy = Policy::golden(inst);
    const auto bf = brute_force(inst, order, policy, Objective::expectation());
    CHECK(bf.method == EvalResult::Method::brute_force);
    CHECK(bf.value == doctest::Approx(eval_exact(inst, order, policy, Objective::expectation()).value).epsilon(1e-13));
    CHECK_THROWS_AS(brute_force(inst, order, policy, Objective::expectation(), {.profile_cap = 11}), CapExceeded);
}

TEST_CASE("exact DP agrees with brute force and with decide-driven enumeration") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 60; ++i) {
        const auto inst = t::random_instance(rng, {.max_boxes = 4, .max_support = 3});
        const auto order = t::random_order(rng, inst.size());
        const std::vector<Policy> policies{Policy::golden(inst),
                                           Policy::maxprob(inst),
                                           Policy::opt_expectation(inst, order),
                                           Policy::opt_maxprob(inst, order),
                                           Policy::single_threshold(2.0)};
        for (const auto& policy : policies) {
            for (const auto& obj : {Objective::expectation(), Objective::winprob()}) {
                const bool wp = obj.kind == Objective::Kind::winprob;
                const double exact = eval_exact(inst, order, policy, obj).value;
                CHECK(std::abs(exact - brute_force(inst, order, policy, obj).value) <= 1e-12);
                CHECK(std::abs(exact - t::enumerate_policy(inst, order, policy, wp)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("state cap on exact evaluation") {
    const auto inst = coin_and_one();
    CHECK_THROWS_AS(eval_exact(inst, Order::identity(2), Policy::golden(inst), Objective::expectation(),
                               {.state_cap = 2}),
                    CapExceeded);
}

TEST_CASE("monte carlo is reproducible and within three standard errors") {
    const auto inst = coin_and_one();
    const Order order = Order::identity(2);
    const auto policy = Policy::single_threshold(1.5);
    const auto a = monte_carlo(inst, order, policy, Objective::winprob(), 20000, 9);
    const auto b = monte_carlo(inst, order, policy, Objective::winprob(), 20000, 9, {.threads = 3});
    CHECK(a.value == b.value);
    CHECK(a.method == EvalResult::Method::monte_carlo);
    REQUIRE(a.samples.has_value());
    CHECK(*a.samples == 20000);
    REQUIRE(a.std_error.has_value());
    CHECK(std::abs(a.value - 0.5) <= 3.0 * *a.std_error);
    CHECK(monte_carlo(inst, order, policy, Objective::winprob(), 20000, 10).value != a.value);
}

TEST_CASE("objectives parse and print") {
    CHECK(Objective::parse("expectation").kind == Objective::Kind::expectation);
    CHECK(Objective::parse("winprob").baseline == 0.0);
    CHECK(Objective::parse("winprob:1.5").baseline == 1.5);
    CHECK(Objective::parse("winprob:1.5").to_string() == "winprob:1.5");
    CHECK_THROWS_AS(Objective::parse("revenue"), std::invalid_argument);
    CHECK(to_string(EvalResult::Method::exact_dp) == "exact-dp");
    CHECK(benchmark_for(Objective::winprob()) == BenchmarkKind::opt_maxprob);
}

TEST_CASE("order ratio sweeps") {
    SUBCASE("a single deterministic box") {
        const Instance inst({DiscreteDistribution::point_mass(3.0)});
        const auto report = order_ratio_sweep(inst, Policy::golden(inst), Objective::expectation(),
                                              BenchmarkKind::opt_expectation);
        REQUIRE(report.per_order.size() == 1);
        CHECK(report.min_ratio == doctest::Approx(1.0));
    }
    SUBCASE("all-zero boxes are degenerate with ratio 1") {
        const Instance inst({DiscreteDistribution::point_mass(0.0), DiscreteDistribution::point_mass(0.0)});
        const auto report = order_ratio_sweep(inst, Policy::maxprob(inst), Objective::winprob(),
                                              BenchmarkKind::opt_maxprob);
        CHECK(report.per_order.size() == 2);
        CHECK(report.per_order[0].degenerate);
        CHECK(report.min_ratio == 1.0);
    }
    SUBCASE("the sqrt 2 instance's bad order") {
        const auto fam = example1(1e-3);
        const auto report = order_ratio_sweep(fam.instance, Policy::golden(fam.instance), Objective::expectation(),
                                              BenchmarkKind::opt_expectation);
        CHECK(report.per_order.size() == 6);
        CHECK(report.min_ratio == doctest::Approx(0.7074605).epsilon(1e-6));
        // The first order reaching the minimum in lexicographic order.
        for (std::size_t i = 0; i < report.argmin; ++i) CHECK(report.per_order[i].ratio > report.min_ratio);
        const auto single = order_ratio(fam.instance, fam.order("order_a"), Policy::golden(fam.instance),
                                        Objective::expectation(), BenchmarkKind::opt_expectation);
        CHECK(single.ratio == doctest::Approx(0.7074605).epsilon(1e-6));
    }
    SUBCASE("sweeps refuse order-aware policies and large n") {
        const auto inst = coin_and_one();
        CHECK_THROWS_AS(order_ratio_sweep(inst, Policy::opt_expectation(inst, Order::identity(2)),
                                          Objective::expectation(), BenchmarkKind::opt_expectation),
                        std::invalid_argument);
        CHECK_THROWS_AS(order_ratio_sweep(inst, Policy::golden(inst), Objective::expectation(),
                                          BenchmarkKind::opt_expectation, {.permutation_cap = 1}),
                        CapExceeded);
    }
    SUBCASE("parallel and serial sweeps agree") {
        std::mt19937_64 rng(59);
        const auto inst = t::random_instance(rng, {.min_boxes = 4, .max_boxes = 4});
        const auto golden = Policy::golden(inst);
        const auto a = order_ratio_sweep(inst, golden, Objective::expectation(), BenchmarkKind::opt_expectation,
                                         {.threads = 1});
        const auto b = order_ratio_sweep(inst, golden, Objective::expectation(), BenchmarkKind::opt_expectation,
                                         {.threads = 4});
        CHECK(a.min_ratio == b.min_ratio);
        CHECK(a.argmin == b.argmin);
    }
}

TEST_CASE("all orders are lexicographic permutations") {
    const auto orders = all_orders(3);
    REQUIRE(orders.size() == 6);
    CHECK(orders.front() == Order({0, 1, 2}, 3));
    CHECK(orders[1] == Order({0, 2, 1}, 3));
    CHECK(orders.back() == Order({2, 1, 0}, 3));
}

TEST_CASE("golden suffix audit") {
    const auto fam = example1(1e-3);
    const auto rows = suffix_audit(fam.instance, fam.order("order_a"));
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row.passed());
    // Last position: no boxes left, everything is zero.
    CHECK(rows.back().alg_suffix == 0.0);
    CHECK(rows.back().beta == 0.0);
    // After the first box: suffix {HV, 1}.
    CHECK(rows[0].alpha == doctest::Approx(1.23545).epsilon(1e-5));
    CHECK(rows[0].beta == doctest::Approx(0.99838).epsilon(1e-5));

    std::mt19937_64 rng(61);
    for (int i = 0; i < 100; ++i) {
        const auto inst = t::random_instance(rng, {.max_boxes = 6, .max_support = 4, .unique_max = false});
        const auto order = t::random_order(rng, inst.size());
        const auto audit = suffix_audit(inst, order);
        for (std::size_t pos = 0; pos < audit.size(); ++pos) {
            CHECK(audit[pos].passed());
            // The suffix value is the golden policy run on the boxes after pos.
            if (pos + 1 < inst.size()) {
                std::vector<DiscreteDistribution> rest;
                for (BoxId id : order.after(pos)) rest.push_back(inst.box(id));
                const Instance sub(rest);
                const auto sub_value = eval_exact(sub, Order::identity(sub.size()), Policy::golden(sub),
                                                  Objective::expectation()).value;
                CHECK(audit[pos].alg_suffix == doctest::Approx(sub_value).epsilon(1e-12));
            }
        }
    }
}
