#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "bgnbd/model.hpp"

using namespace bgnbd;

namespace {

struct TupleGen {
    std::mt19937_64 rng;
    explicit TupleGen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    ModelParams params()
    {
        return {log_uniform(0.1, 3.0), log_uniform(0.5, 50.0), log_uniform(0.3, 3.0),
                log_uniform(0.3, 5.0)};
    }
    CustomerSummary summary(std::int64_t x)
    {
        const double t_x = x == 0 ? 0.0 : uniform(0.0, 1000.0);
        return {x, t_x, t_x + uniform(0.0, 500.0)};
    }
};

} // namespace

TEST_CASE("effective_horizon")
{
    // paper's worked setting: last purchase 20 days ago, 30-day window
    CHECK(effective_horizon({3, 20.0, 40.0}, {30.0}) == 10.0);
    // inactivity already past the window
    CHECK(effective_horizon({2, 5.0, 50.0}, {30.0}) == 0.0);
    // purchase today: the full window remains
    CHECK(effective_horizon({1, 17.0, 17.0}, {30.0}) == 30.0);
}

TEST_CASE("summary and params validation")
{
    CHECK_THROWS_AS((CustomerSummary{-1, 0.0, 5.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CustomerSummary{2, 10.0, 5.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((CustomerSummary{0, 3.0, 5.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{0.0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ChurnQuery{0.0}.validate()), std::invalid_argument);
}

TEST_CASE("log_likelihood: x = 0 collapses to r ln(alpha/(alpha+T))")
{
    TupleGen gen(101);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p = gen.params();
        const double T = gen.uniform(0.0, 2000.0);
        const double expected = p.r * std::log(p.alpha / (p.alpha + T));
        CHECK(log_likelihood(p, {0, 0.0, T}) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("log_likelihood matches the arbitrary-precision oracle")
{
    // both values frozen from a 60-digit evaluation of the likelihood
    CHECK(log_likelihood({0.5, 10.0, 1.0, 2.5}, {5, 30.0, 40.0}) ==
          doctest::Approx(-17.65605641148860285832807).epsilon(1e-12));
    const double big_x = log_likelihood({0.25, 4.0, 0.8, 2.4}, {200, 300.0, 365.0});
    CHECK(std::isfinite(big_x));
    CHECK(big_x == doctest::Approx(-295.6261586339129589912755).epsilon(1e-12));
}

TEST_CASE("dataset_log_likelihood: additivity, order invariance, errors")
{
    const ModelParams p{0.5, 6.0, 0.9, 2.5};
    const CustomerSummary s{5, 30.0, 40.0};
    const double single = log_likelihood(p, s);

    std::vector<CustomerSummary> one{s};
    CHECK(dataset_log_likelihood(p, one) == single);
    std::vector<CustomerSummary> two{s, s};
    CHECK(dataset_log_likelihood(p, two) == doctest::Approx(2.0 * single).epsilon(1e-15));
    const std::vector<CustomerSummary> empty;
    CHECK_THROWS_AS(dataset_log_likelihood(p, empty), std::invalid_argument);

    TupleGen gen(103);
    std::vector<CustomerSummary> cohort;
    for (int i = 0; i < 2000; ++i) {
        cohort.push_back(gen.summary(i % 7 == 0 ? 0 : static_cast<std::int64_t>(
                                                          gen.uniform(1.0, 40.0))));
    }
    const double before = dataset_log_likelihood(p, cohort);
    std::shuffle(cohort.begin(), cohort.end(), gen.rng);
    CHECK(std::abs(dataset_log_likelihood(p, cohort) - before) <= 1e-9);
}

TEST_CASE("reference evaluator: closed forms and range errors")
{
    // t = 0: numerator and denominator coincide
    CHECK(churn_probability_reference({0.5, 10.0, 1.0, 2.5}, {5, 30.0, 40.0}, 0.0) == 1.0);
    // x = 0 closed form ((alpha+T)/(alpha+T+t))^r
    CHECK(churn_probability_reference({1.0, 10.0, 1.0, 2.5}, {0, 0.0, 10.0}, 20.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // frozen from a 60-digit evaluation
    CHECK(churn_probability_reference({0.5, 10.0, 1.0, 2.5}, {5, 30.0, 40.0}, 20.0) ==
          doctest::Approx(0.4472774555912547022059039).epsilon(1e-12));
    // (alpha+t_x)^{r+x} far beyond float64 at x = 10000
    CHECK_THROWS_AS(
        churn_probability_reference({0.25, 4.0, 0.8, 2.4}, {10000, 300.0, 365.0}, 30.0),
        NumericRangeError);
}

TEST_CASE("stable evaluator: boundary, closed form, large x")
{
    TupleGen gen(107);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p = gen.params();
        const CustomerSummary s = gen.summary(i % 5);
        CHECK(churn_probability(p, s, 0.0) == 1.0); // exact, not approximate
    }
    CHECK(churn_probability({1.0, 10.0, 1.0, 2.5}, {0, 0.0, 10.0}, 20.0) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // x = 500 where the float64 reference overflows; the 60-digit value
    // is 1 - 5.008e-40, i.e. exactly 1 in float64
    const double large = churn_probability({0.25, 4.0, 0.8, 2.4}, {500, 300.0, 365.0}, 30.0);
    CHECK(std::isfinite(large));
    CHECK(large == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(large <= 1.0);
    CHECK_THROWS_AS(
        churn_probability_reference({0.25, 4.0, 0.8, 2.4}, {500, 300.0, 365.0}, 30.0),
        NumericRangeError);
}

TEST_CASE("stable evaluator: x = 0 closed form across random tuples")
{
    TupleGen gen(109);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p = gen.params();
        const double T = gen.uniform(0.0, 2000.0);
        const double t = gen.uniform(0.0, 365.0);
        const double expected = std::pow((p.alpha + T) / (p.alpha + T + t), p.r);
        CHECK(churn_probability(p, {0, 0.0, T}, t) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("stable and reference evaluators agree for x <= 50")
{
    TupleGen gen(113);
    int compared = 0;
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p = gen.params();
        const CustomerSummary s =
            gen.summary(static_cast<std::int64_t>(gen.uniform(0.0, 51.0)));
        const double t = gen.uniform(0.0, 365.0);
        const double stable = churn_probability(p, s, t);
        try {
            const double reference = churn_probability_reference(p, s, t);
            CHECK(std::abs(stable - reference) <= 1e-10);
            ++compared;
        } catch (const NumericRangeError&) {
            // documented frontier of the reference path
        }
    }
    CHECK(compared > 1500);
}

TEST_CASE("stable evaluator stays in [0,1] for huge x")
{
    TupleGen gen(127);
    for (std::int64_t x : {100, 1000, 10000}) {
        for (int i = 0; i < 300; ++i) {
            const ModelParams p = gen.params();
            const CustomerSummary s = gen.summary(x);
            const double v = churn_probability(p, s, gen.uniform(0.0, 365.0));
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("churn probability is non-increasing in t")
{
    TupleGen gen(131);
    for (int i = 0; i < 300; ++i) {
        const ModelParams p = gen.params();
        const CustomerSummary s =
            gen.summary(static_cast<std::int64_t>(gen.uniform(0.0, 200.0)));
        double previous = 1.0;
        for (int k = 0; k <= 50; ++k) {
            const double v = churn_probability(p, s, 400.0 * k / 50.0);
            CHECK(v <= previous + 1e-12);
            previous = v;
        }
    }
}

TEST_CASE("churn_probability_window")
{
    const ChurnScore churned = churn_probability_window({1.0, 10.0, 1.0, 1.0},
                                                        {2, 5.0, 50.0}, {30.0});
    CHECK(churned.probability == 1.0);
    CHECK(churned.already_churned);
    CHECK(churned.effective_horizon == 0.0);

    // x = 0, horizon 10 remains: ((alpha+T)/(alpha+T+10))^r = 50/60
    const ChurnScore waiting = churn_probability_window({1.0, 10.0, 1.0, 1.0},
                                                        {0, 0.0, 40.0}, {50.0});
    CHECK(!waiting.already_churned);
    CHECK(waiting.effective_horizon == 10.0);
    CHECK(waiting.probability == doctest::Approx(50.0 / 60.0).epsilon(1e-13));

    // frozen oracle value, reached through the window path (t~ = 20)
    const ChurnScore derived = churn_probability_window({0.5, 10.0, 1.0, 2.5},
                                                        {5, 30.0, 40.0}, {30.0});
    CHECK(derived.effective_horizon == 20.0);
    CHECK(derived.probability ==
          doctest::Approx(0.4472774555912547022059039).epsilon(1e-12));

    // the paper's horizon claim: inactivity >= M forces probability 1
    TupleGen gen(137);
    for (int i = 0; i < 1000; ++i) {
        const ModelParams p = gen.params();
        CustomerSummary s = gen.summary(3);
        const double M = gen.uniform(0.1, 60.0);
        s.T = s.t_x + M + gen.uniform(0.0, 100.0);
        const ChurnScore score = churn_probability_window(p, s, {M});
        CHECK(score.probability == 1.0);
        CHECK(score.already_churned);
    }
}
