#include "bgnbd/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bgnbd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
constexpr double kInitialRelStep = 0.05;
constexpr double kInitialZeroStep = 0.00025;
} // namespace

void FitConfig::validate() const
{
    initial_params.validate();
    if (max_iterations < 1) {
        throw std::invalid_argument("FitConfig: max_iterations must be >= 1");
    }
    if (!(objective_tolerance > 0.0) || !(parameter_tolerance > 0.0)) {
        throw std::invalid_argument("FitConfig: tolerances must be > 0");
    }
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::span<const double> initial_point,
                          const FitConfig& config)
{
    config.validate();
    const std::size_t n = initial_point.size();
    if (n == 0) {
        throw std::invalid_argument("nelder_mead: empty initial point");
    }

    std::int64_t evaluations = 0;
    auto eval = [&](const std::vector<double>& p) {
        ++evaluations;
        const double v = objective(p);
        return std::isfinite(v) ? v : kInf;
    };

    std::vector<std::vector<double>> simplex;
    simplex.reserve(n + 1);
    simplex.emplace_back(initial_point.begin(), initial_point.end());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = simplex[0];
        v[i] = v[i] != 0.0 ? v[i] * (1.0 + kInitialRelStep) : kInitialZeroStep;
        simplex.push_back(std::move(v));
    }

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = eval(simplex[i]);
    }
    if (values[0] == kInf) {
        throw std::invalid_argument("nelder_mead: objective non-finite at initial point");
    }

    // index order: values[order[0]] best
    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    };
    sort_order();

    auto converged_now = [&] {
        const std::size_t best = order[0];
        double value_spread = 0.0;
        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            value_spread = std::max(value_spread, std::abs(values[i] - values[best]));
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
            }
        }
        return value_spread <= config.objective_tolerance &&
               diameter <= config.parameter_tolerance;
    };

    std::int64_t iterations = 0;
    bool converged = converged_now();
    while (!converged && iterations < config.max_iterations) {
        ++iterations;
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];
        const std::size_t best = order[0];

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coef * (centroid[j] - simplex[worst][j]);
            }
            return p;
        };

        std::vector<double> reflected = blend(kReflect);
        const double f_reflected = eval(reflected);

        bool shrink = false;
        if (f_reflected < values[best]) {
            std::vector<double> expanded = blend(kExpand);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = std::move(expanded);
                values[worst] = f_expanded;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = std::move(reflected);
            values[worst] = f_reflected;
        } else if (f_reflected < values[worst]) {
            std::vector<double> contracted = blend(kContract);
            const double f_contracted = eval(contracted);
            if (f_contracted <= f_reflected) {
                simplex[worst] = std::move(contracted);
                values[worst] = f_contracted;
            } else {
                shrink = true;
            }
        } else {
            std::vector<double> contracted = blend(-kContract);
            const double f_contracted = eval(contracted);
            if (f_contracted < values[worst]) {
                simplex[worst] = std::move(contracted);
                values[worst] = f_contracted;
            } else {
                shrink = true;
            }
        }

        if (shrink) {
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    simplex[i][j] =
                        simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
                }
                values[i] = eval(simplex[i]);
            }
        }

        sort_order();
        converged = converged_now();
    }

    return SimplexResult{simplex[order[0]], values[order[0]], iterations, converged,
                         evaluations};
}

FitReport fit(std::span<const CustomerSummary> summaries, const FitConfig& config)
{
    config.validate();
    if (summaries.size() < 10) {
        throw std::invalid_argument("fit: need at least 10 customer summaries");
    }
    const bool any_repeat =
        std::any_of(summaries.begin(), summaries.end(),
                    [](const CustomerSummary& s) { return s.x >= 1; });
    if (!any_repeat) {
        throw IdentifiabilityError(
            "fit: every customer has x = 0; a and b are unidentifiable");
    }

    auto objective = [&](std::span<const double> log_params) {
        const ModelParams p{std::exp(log_params[0]), std::exp(log_params[1]),
                            std::exp(log_params[2]), std::exp(log_params[3])};
        if (!std::isfinite(p.r) || !std::isfinite(p.alpha) || !std::isfinite(p.a) ||
            !std::isfinite(p.b) || p.r <= 0.0 || p.alpha <= 0.0 || p.a <= 0.0 ||
            p.b <= 0.0) {
            return kInf;
        }
        return -dataset_log_likelihood(p, summaries);
    };

    const std::vector<double> start{
        std::log(config.initial_params.r), std::log(config.initial_params.alpha),
        std::log(config.initial_params.a), std::log(config.initial_params.b)};

    const SimplexResult result = nelder_mead(objective, start, config);

    ModelParams fitted{std::exp(result.point[0]), std::exp(result.point[1]),
                       std::exp(result.point[2]), std::exp(result.point[3])};
    fitted.validate();
    return FitReport{fitted, result.value, result.iterations, result.converged,
                     result.evaluations};
}

} // namespace bgnbd
