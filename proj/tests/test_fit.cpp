#include <cmath>
#include <cstring>
#include <vector>

#include <doctest.h>

#include "bgnbd/fit.hpp"
#include "bgnbd/simulate.hpp"

using namespace bgnbd;

namespace {

std::vector<CustomerSummary> simulated_summaries(const SimulationConfig& config)
{
    std::vector<CustomerSummary> summaries;
    for (const SimulatedCustomer& c : simulate_cohort(config).customers) {
        summaries.push_back(c.summary);
    }
    return summaries;
}

bool params_bitwise_equal(const ModelParams& lhs, const ModelParams& rhs)
{
    return std::memcmp(&lhs, &rhs, sizeof lhs) == 0;
}

} // namespace

TEST_CASE("nelder_mead: convex quadratic")
{
    FitConfig config;
    auto objective = [](std::span<const double> p) {
        return (p[0] - 1.0) * (p[0] - 1.0) + (p[1] - 2.0) * (p[1] - 2.0);
    };
    const std::vector<double> start{0.0, 0.0};
    const SimplexResult result = nelder_mead(objective, start, config);
    CHECK(result.converged);
    CHECK(std::abs(result.point[0] - 1.0) <= 1e-6);
    CHECK(std::abs(result.point[1] - 2.0) <= 1e-6);
}

TEST_CASE("nelder_mead: 1-d absolute value")
{
    FitConfig config;
    auto objective = [](std::span<const double> p) { return std::abs(p[0]); };
    const std::vector<double> start{3.0};
    const SimplexResult result = nelder_mead(objective, start, config);
    CHECK(std::abs(result.point[0]) <= 1e-6);
}

TEST_CASE("nelder_mead: Rosenbrock from (-1.2, 1)")
{
    FitConfig config;
    config.max_iterations = 2000;
    auto objective = [](std::span<const double> p) {
        const double a = 1.0 - p[0];
        const double b = p[1] - p[0] * p[0];
        return a * a + 100.0 * b * b;
    };
    const std::vector<double> start{-1.2, 1.0};
    const SimplexResult result = nelder_mead(objective, start, config);
    CHECK(result.iterations <= 2000);
    CHECK(std::abs(result.point[0] - 1.0) <= 1e-4);
    CHECK(std::abs(result.point[1] - 1.0) <= 1e-4);
}

TEST_CASE("nelder_mead: error handling")
{
    FitConfig config;
    auto bad = [](std::span<const double>) { return std::nan(""); };
    const std::vector<double> start{0.0};
    CHECK_THROWS_AS(nelder_mead(bad, start, config), std::invalid_argument);

    // non-finite away from the start is treated as a rejected vertex
    auto walled = [](std::span<const double> p) {
        if (p[0] > 0.5) return std::nan("");
        return (p[0] - 0.25) * (p[0] - 0.25);
    };
    const SimplexResult result = nelder_mead(walled, start, config);
    CHECK(std::abs(result.point[0] - 0.25) <= 1e-6);
}

TEST_CASE("fit: preconditions")
{
    std::vector<CustomerSummary> tiny(5, CustomerSummary{1, 3.0, 10.0});
    CHECK_THROWS_AS(fit(tiny, FitConfig{}), std::invalid_argument);

    std::vector<CustomerSummary> no_repeats(50, CustomerSummary{0, 0.0, 10.0});
    CHECK_THROWS_AS(fit(no_repeats, FitConfig{}), IdentifiabilityError);
}

TEST_CASE("fit: recovers structure on a simulated cohort")
{
    const ModelParams truth{0.5, 6.0, 0.9, 2.5};
    const auto summaries =
        simulated_summaries({truth, 4000, 546.0, 0.0, 20240001, false});

    FitConfig config;
    const FitReport report = fit(summaries, config);
    CHECK(report.converged);
    CHECK(std::isfinite(report.neg_log_likelihood));

    // never worse than the starting point
    const double start_nll = -dataset_log_likelihood(config.initial_params, summaries);
    CHECK(report.neg_log_likelihood <= start_nll);

    // strictly positive, finite, and loosely near the generator
    CHECK_NOTHROW(report.params.validate());
    CHECK(report.params.r == doctest::Approx(truth.r).epsilon(0.25));
    CHECK(report.params.alpha == doctest::Approx(truth.alpha).epsilon(0.25));

    // determinism: an identical rerun reproduces the report bitwise
    const FitReport again = fit(summaries, config);
    CHECK(params_bitwise_equal(report.params, again.params));
    CHECK(report.neg_log_likelihood == again.neg_log_likelihood);
    CHECK(report.iterations == again.iterations);
    CHECK(report.objective_evaluations == again.objective_evaluations);

    // refitting from the optimum must not regress
    FitConfig warm = config;
    warm.initial_params = report.params;
    const FitReport refit = fit(summaries, warm);
    CHECK(refit.neg_log_likelihood <=
          report.neg_log_likelihood + config.objective_tolerance);
}

TEST_CASE("fit: iteration cap reports converged=false")
{
    const auto summaries =
        simulated_summaries({{0.5, 6.0, 0.9, 2.5}, 200, 200.0, 0.0, 7, false});
    FitConfig config;
    config.max_iterations = 1;
    const FitReport report = fit(summaries, config);
    CHECK(!report.converged);
    CHECK(report.iterations == 1);
}
