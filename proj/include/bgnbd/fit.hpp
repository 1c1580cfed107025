#ifndef BGNBD_FIT_HPP
#define BGNBD_FIT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bgnbd/model.hpp"

namespace bgnbd {

// Raised when the dataset cannot pin down all four parameters
// (every customer has x = 0, so a and b never enter the likelihood).
class IdentifiabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitConfig {
    ModelParams initial_params{1.0, 1.0, 1.0, 1.0};
    std::int64_t max_iterations = 10000;
    double objective_tolerance = 1e-9;
    double parameter_tolerance = 1e-8;

    void validate() const;
};

struct FitReport {
    ModelParams params;
    double neg_log_likelihood;
    std::int64_t iterations;
    bool converged;
    std::int64_t objective_evaluations;
};

struct SimplexResult {
    std::vector<double> point;
    double value;
    std::int64_t iterations;
    bool converged;
    std::int64_t evaluations;
};

// Derivative-free Nelder-Mead with the standard reflection/expansion/
// contraction/shrink coefficients (1, 2, 0.5, 0.5). The initial simplex
// perturbs each coordinate by +5% (or to 0.00025 when it is zero).
// Non-finite objective values mid-run are treated as +inf; a non-finite
// value at the initial point throws std::invalid_argument.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::span<const double> initial_point,
                          const FitConfig& config);

// Maximum-likelihood fit of (r, alpha, a, b). Optimizes over the log of
// each parameter so positivity never needs an explicit constraint.
// Deterministic for fixed inputs and config. Requires at least 10
// summaries and at least one with x >= 1.
FitReport fit(std::span<const CustomerSummary> summaries, const FitConfig& config);

} // namespace bgnbd

#endif
