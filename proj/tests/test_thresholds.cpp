#include <doctest.h>

#include <cmath>
#include <random>

#include "prophet/thresholds.hpp"
#include "support/oracles.hpp"

using namespace prophet;
namespace t = prophet::testing;

namespace {

SuffixMaxDistribution law_of(std::initializer_list<DiscreteDistribution> boxes) {
    std::vector<DiscreteDistribution> v(boxes);
    return SuffixMaxDistribution::of(v);
}

double beta_residual(const SuffixMaxDistribution& d) {
    const double b = solve_beta(d);
    return std::abs(expected_surplus(d, kPhi * b) - b);
}

}  // namespace

TEST_CASE("constants") {
    const auto& c = constants();
    CHECK(c.phi == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    CHECK(c.inv_phi == doctest::Approx(c.phi - 1.0).epsilon(1e-15));
    CHECK(std::abs(c.lambda / (1.0 - c.lambda) - std::log(1.0 / c.lambda)) <= 1e-14);
    CHECK(c.lambda == doctest::Approx(0.4464).epsilon(1e-4));
    CHECK(c.ln_inv_lambda == doctest::Approx(0.806466).epsilon(1e-5));
    CHECK(solve_lambda() == c.lambda);
}

TEST_CASE("suffix max of a coin and a constant") {
    const auto law = law_of({DiscreteDistribution::from_outcomes({{0.0, 0.5}, {2.0, 0.5}}),
                             DiscreteDistribution::point_mass(1.0)});
    const auto& d = law.distribution();
    REQUIRE(d.size() == 2);
    CHECK(d.outcomes()[0].value == 1.0);
    CHECK(d.outcomes()[0].prob == doctest::Approx(0.5));
    CHECK(d.outcomes()[1].value == 2.0);
    CHECK(expected_surplus(law, 1.5) == doctest::Approx(0.25));
}

TEST_CASE("empty suffix is the recursion boundary") {
    const auto e = SuffixMaxDistribution::empty();
    CHECK(e.empty_set());
    CHECK(e.expectation() == 0.0);
    CHECK(e.prob_below(0.5, true) == 1.0);
    CHECK(expected_surplus(e, 0.0) == 0.0);
    CHECK(solve_beta(e) == 0.0);
    const auto tr = threshold_triple(e);
    CHECK(tr.tau == 0.0);
}

TEST_CASE("suffix max matches profile enumeration") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto inst = t::random_instance(rng, {.max_boxes = 5, .max_support = 4, .unique_max = false});
        std::vector<t::Atoms> boxes;
        for (const auto& b : inst.boxes()) boxes.push_back(t::atoms_of(b));
        const auto expected = t::enumerate_max(boxes);
        const auto got = t::atoms_of(SuffixMaxDistribution::of(inst.boxes()).distribution());
        REQUIRE(got.size() == expected.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(got[k].first == expected[k].first);
            CHECK(got[k].second == doctest::Approx(expected[k].second).epsilon(1e-12));
        }
    }
}

TEST_CASE("beta closed forms") {
    SUBCASE("point mass c gives c / phi^2") {
        for (double c : {0.5, 1.0, 3.0, 1e6}) {
            CHECK(std::abs(solve_beta(law_of({DiscreteDistribution::point_mass(c)})) - c / (kPhi * kPhi)) <= 1e-12 * c);
        }
    }
    SUBCASE("rare big value: 1/eps w.p. eps, 1 otherwise") {
        const double eps = 0.01;
        const auto law = law_of({DiscreteDistribution::from_outcomes({{1.0, 1.0 - eps}, {1.0 / eps, eps}})});
        CHECK(solve_beta(law) == doctest::Approx(1.0 / (1.0 + eps * kPhi)).epsilon(1e-12));
    }
}

TEST_CASE("beta agrees with bisection and has tiny residual") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
        const auto inst = t::random_instance(rng, {.max_boxes = 5, .max_support = 4, .unique_max = false});
        const auto law = SuffixMaxDistribution::of(inst.boxes());
        CHECK(beta_residual(law) <= 1e-10);
        CHECK(solve_beta(law) == doctest::Approx(t::bisect_beta(t::atoms_of(law.distribution()))).epsilon(1e-10));
    }
}

TEST_CASE("threshold triples") {
    const auto one = threshold_triple(law_of({DiscreteDistribution::point_mass(1.0)}));
    CHECK(one.alpha == doctest::Approx(0.618034).epsilon(1e-6));
    CHECK(one.beta == doctest::Approx(0.381966).epsilon(1e-6));
    CHECK(one.tau == one.alpha);

    // Suffix {1, 1000 w.p. 0.001} of the sqrt 2 instance.
    const double eps = 1e-3;
    const auto tail = law_of({DiscreteDistribution::point_mass(1.0), DiscreteDistribution::two_point(1.0 / eps, eps)});
    const auto tr = threshold_triple(tail);
    CHECK(tr.alpha == doctest::Approx(1.23545).epsilon(1e-5));
    CHECK(tr.beta == doctest::Approx(0.99838).epsilon(1e-5));
    CHECK(tr.tau == tr.alpha);
}

TEST_CASE("beta is at least alpha / phi") {
    // E[(y - phi beta)^+] >= E[y] - phi beta, so beta >= E[y] / (1 + phi) = alpha / phi.
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
        const auto inst = t::random_instance(rng, {.max_boxes = 4, .unique_max = false});
        const auto tr = threshold_triple(SuffixMaxDistribution::of(inst.boxes()));
        CHECK(tr.beta >= tr.alpha / kPhi - 1e-12);
        CHECK(tr.tau == std::max(tr.alpha, tr.beta));
    }
}

TEST_CASE("classic thresholds") {
    // max of {1, 4 w.p. 1/2}: P[max = 1] = 1/2, E = 2.5.
    const Instance inst({DiscreteDistribution::point_mass(1.0),
                         DiscreteDistribution::from_outcomes({{0.0, 0.5}, {4.0, 0.5}})});
    const auto c = classic_thresholds(inst);
    CHECK(c.median_of_max == 1.0);
    CHECK(c.half_expected_max == doctest::Approx(1.25));
    CHECK(c.inv_e_quantile == 1.0);

    const Instance coin({DiscreteDistribution::from_outcomes({{1.0, 0.5}, {2.0, 0.5}})});
    CHECK(classic_thresholds(coin).half_expected_max == doctest::Approx(0.75));
}
