#include "bgnbd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bgnbd {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640561764;

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double log_gamma_lanczos(double z)
{
    // valid for z >= 0.5
    const double zm1 = z - 1.0;
    double series = kLanczos[0];
    for (int i = 1; i < 9; ++i) {
        series += kLanczos[i] / (zm1 + i);
    }
    const double t = zm1 + 7.5; // g + 0.5
    return kLnSqrt2Pi + (zm1 + 0.5) * std::log(t) - t + std::log(series);
}

} // namespace

double log_gamma(double z)
{
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::domain_error("log_gamma: argument must be positive and finite");
    }
    if (z < 0.5) {
        // reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1-z)
        return std::log(kPi / std::sin(kPi * z)) - log_gamma_lanczos(1.0 - z);
    }
    return log_gamma_lanczos(z);
}

double log_beta(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw std::domain_error("log_beta: arguments must be positive and finite");
    }
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

LogDomainPair shifted_exp_sum2(double k1, double k2)
{
    if (std::isnan(k1) || std::isnan(k2)) {
        throw std::domain_error("shifted_exp_sum2: NaN argument");
    }
    const double inf = std::numeric_limits<double>::infinity();
    if (k1 == -inf && k2 == -inf) {
        return {-inf, 0.0};
    }
    if (k1 == -inf) {
        return {k2, 1.0};
    }
    if (k2 == -inf) {
        return {k1, 1.0};
    }
    const double k = std::max(k1, k2);
    return {k, std::exp(k1 - k) + std::exp(k2 - k)};
}

double log_sum_exp2(double k1, double k2)
{
    const LogDomainPair pair = shifted_exp_sum2(k1, k2);
    if (pair.residual_sum == 0.0) {
        return pair.shift; // both terms exactly dropped
    }
    return pair.shift + std::log(pair.residual_sum);
}

} // namespace bgnbd
