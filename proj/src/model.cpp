#include "bgnbd/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bgnbd/special_functions.hpp"

namespace bgnbd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryClamp = 1e-12;
} // namespace

void ModelParams::validate() const
{
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(r) || !ok(alpha) || !ok(a) || !ok(b)) {
        throw std::invalid_argument(
            "ModelParams: r, alpha, a, b must all be positive and finite");
    }
}

void CustomerSummary::validate() const
{
    if (x < 0) {
        throw std::invalid_argument("CustomerSummary: x must be non-negative");
    }
    if (!(t_x >= 0.0) || !(T >= t_x) || !std::isfinite(T)) {
        throw std::invalid_argument("CustomerSummary: need 0 <= t_x <= T, finite");
    }
    if (x == 0 && t_x != 0.0) {
        throw std::invalid_argument("CustomerSummary: x = 0 requires t_x = 0");
    }
}

void ChurnQuery::validate() const
{
    if (!(M > 0.0) || !std::isfinite(M)) {
        throw std::invalid_argument("ChurnQuery: M must be positive and finite");
    }
}

double effective_horizon(const CustomerSummary& summary, const ChurnQuery& query)
{
    summary.validate();
    query.validate();
    const double inactivity = summary.T - summary.t_x;
    return std::max(0.0, query.M - inactivity);
}

double log_likelihood(const ModelParams& params, const CustomerSummary& summary)
{
    params.validate();
    summary.validate();
    const double r = params.r, alpha = params.alpha, a = params.a, b = params.b;
    const double x = static_cast<double>(summary.x);

    const double age_term = log_beta(a, b + x) - (r + x) * std::log(alpha + summary.T);
    const double recency_term =
        summary.x > 0
            ? log_beta(a + 1.0, b + x - 1.0) - (r + x) * std::log(alpha + summary.t_x)
            : -kInf;

    return log_gamma(r + x) - log_gamma(r) + r * std::log(alpha) - log_beta(a, b) +
           log_sum_exp2(age_term, recency_term);
}

double dataset_log_likelihood(const ModelParams& params,
                              std::span<const CustomerSummary> summaries)
{
    if (summaries.empty()) {
        throw std::invalid_argument("dataset_log_likelihood: empty dataset");
    }
    // Neumaier compensated sum
    double sum = 0.0;
    double comp = 0.0;
    for (const CustomerSummary& s : summaries) {
        const double v = log_likelihood(params, s);
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

double churn_probability_reference(const ModelParams& params,
                                   const CustomerSummary& summary, double t)
{
    params.validate();
    summary.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("churn_probability_reference: t must be >= 0 and finite");
    }
    const double r = params.r, alpha = params.alpha, a = params.a, b = params.b;
    const double x = static_cast<double>(summary.x);
    const double phi = -(r + x);

    // Subnormals carry too few bits to trust; they count as underflow here.
    auto require_usable = [](double v, const char* what) {
        if (!std::isfinite(v) || v < std::numeric_limits<double>::min()) {
            throw NumericRangeError(std::string("churn_probability_reference: ") + what +
                                    " left float64 range (overflow/underflow)");
        }
    };

    double recency_num = 0.0; // B(a+1,b+x-1) (alpha+t_x)^phi, dropped when x = 0
    if (summary.x > 0) {
        const double beta1 = std::exp(log_beta(a + 1.0, b + x - 1.0));
        const double pow_e = std::pow(alpha + summary.t_x, phi);
        require_usable(beta1, "B(a+1,b+x-1)");
        require_usable(pow_e, "(alpha+t_x)^phi");
        recency_num = beta1 * pow_e;
        require_usable(recency_num, "recency term");
    }

    const double beta2 = std::exp(log_beta(a, b + x));
    const double pow_f = std::pow(alpha + summary.T + t, phi);
    const double pow_g = std::pow(alpha + summary.T, phi);
    require_usable(beta2, "B(a,b+x)");
    require_usable(pow_f, "(alpha+T+t)^phi");
    require_usable(pow_g, "(alpha+T)^phi");
    const double future_term = beta2 * pow_f;
    const double present_term = beta2 * pow_g;
    require_usable(future_term, "numerator age term");
    require_usable(present_term, "denominator age term");

    const double numerator = recency_num + future_term;
    const double denominator = recency_num + present_term;
    require_usable(numerator, "numerator");
    require_usable(denominator, "denominator");

    const double p = numerator / denominator;
    if (!std::isfinite(p)) {
        throw NumericRangeError("churn_probability_reference: quotient left float64 range");
    }
    return p;
}

double churn_probability(const ModelParams& params,
                         const CustomerSummary& summary, double t)
{
    params.validate();
    summary.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("churn_probability: t must be >= 0 and finite");
    }
    const double r = params.r, alpha = params.alpha, a = params.a, b = params.b;
    const double x = static_cast<double>(summary.x);
    const double rx = r + x;

    const double k_recency =
        summary.x > 0
            ? log_beta(a + 1.0, b + x - 1.0) - rx * std::log(alpha + summary.t_x)
            : -kInf;
    const double log_beta_age = log_beta(a, b + x);
    const double k_future = log_beta_age - rx * std::log(alpha + summary.T + t);
    const double k_present = log_beta_age - rx * std::log(alpha + summary.T);

    const double p = std::exp(log_sum_exp2(k_recency, k_future) -
                              log_sum_exp2(k_recency, k_present));
    if (p > 1.0) {
        if (p > 1.0 + kBoundaryClamp) {
            throw std::logic_error("churn_probability: result exceeds 1 beyond rounding");
        }
        return 1.0;
    }
    if (p < 0.0) { // exp() cannot go negative; guards future edits
        throw std::logic_error("churn_probability: negative result");
    }
    return p;
}

ChurnScore churn_probability_window(const ModelParams& params,
                                    const CustomerSummary& summary,
                                    const ChurnQuery& query)
{
    const double horizon = effective_horizon(summary, query);
    if (horizon == 0.0) {
        return ChurnScore{1.0, 0.0, true};
    }
    return ChurnScore{churn_probability(params, summary, horizon), horizon, false};
}

} // namespace bgnbd
