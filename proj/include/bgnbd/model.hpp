#ifndef BGNBD_MODEL_HPP
#define BGNBD_MODEL_HPP

#include <cstdint>
#include <span>
#include <stdexcept>

namespace bgnbd {

// Raised by the reference evaluator when a float64 intermediate
// overflows or underflows out of usable range.
class NumericRangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// The four learned BG/NBD parameters. alpha is in days.
struct ModelParams {
    double r;
    double alpha;
    double a;
    double b;

    // Throws std::invalid_argument unless all four are strictly
    // positive and finite.
    void validate() const;
};

// Per-customer sufficient statistics, all in days from the first
// purchase day. x counts distinct purchasing days after the first.
struct CustomerSummary {
    std::int64_t x;
    double t_x;
    double T;

    void validate() const;
};

// Churn window: a customer has churned once M consecutive days pass
// with no purchase.
struct ChurnQuery {
    double M;

    void validate() const;
};

struct ChurnScore {
    double probability;
    double effective_horizon;
    bool already_churned;
};

// Remaining duration until M days of inactivity complete:
// max(0, M - (T - t_x)). Zero means the customer already churned.
double effective_horizon(const CustomerSummary& summary, const ChurnQuery& query);

// ln L(r,a,b,alpha | x,t_x,T), computed entirely in log domain. The
// recency term is dropped (treated as exp(-inf)) when x = 0. Always
// finite for valid inputs.
double log_likelihood(const ModelParams& params, const CustomerSummary& summary);

// Sum of log_likelihood over all summaries, Neumaier-compensated so the
// result is independent of input order to well below 1e-9.
// Throws std::invalid_argument on an empty span.
double dataset_log_likelihood(const ModelParams& params,
                              std::span<const CustomerSummary> summaries);

// Direct float64 evaluation of the zero-purchase probability
//   [B(a+1,b+x-1) E^phi + B(a,b+x) F^phi] / [B(a+1,b+x-1) E^phi + B(a,b+x) G^phi]
// with E = alpha+t_x, F = alpha+T+t, G = alpha+T, phi = -(r+x).
// Cross-check oracle only: overflows/underflows for large x and then
// throws NumericRangeError rather than returning NaN.
double churn_probability_reference(const ModelParams& params,
                                   const CustomerSummary& summary, double t);

// Stable log-domain evaluation of the same probability via max-shifted
// two-term log-sum-exp. Finite and in [0,1] for x well beyond 10^4.
double churn_probability(const ModelParams& params,
                         const CustomerSummary& summary, double t);

// Applies the churn window: horizon 0 short-circuits to probability 1.
ChurnScore churn_probability_window(const ModelParams& params,
                                    const CustomerSummary& summary,
                                    const ChurnQuery& query);

} // namespace bgnbd

#endif
