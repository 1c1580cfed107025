#ifndef BGNBD_SIMULATE_HPP
#define BGNBD_SIMULATE_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "bgnbd/ingest.hpp"
#include "bgnbd/model.hpp"

namespace bgnbd {

struct SimulationConfig {
    ModelParams params;
    std::int64_t num_customers;
    double horizon;       // observation period in days, shared by the cohort
    double holdout = 0.0; // extra simulated days past the horizon
    std::uint64_t seed = 0;
    bool disable_dropout = false;

    void validate() const;
};

// Deterministic per-customer random stream derived from (seed, index),
// so cohort results never depend on scheduling.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index);

    double uniform01();          // in (0, 1)
    double normal01();           // standard normal, Marsaglia polar
    double gamma(double shape, double rate); // Marsaglia-Tsang
    double beta(double a, double b);         // ratio of two gammas
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

// One customer drawn from the BG/NBD generative process: lambda ~
// Gamma(r, rate alpha), p ~ Beta(a, b) (p = 0 when dropout is disabled),
// first purchase at time 0, exponential inter-purchase waits, and after
// each repeat purchase the customer dies with probability p. Returns all
// purchase times in [0, horizon + holdout] that occur before death.
std::vector<double> sample_customer(const ModelParams& params, double horizon,
                                    double holdout, RngStream& rng,
                                    bool disable_dropout = false);

struct SimulatedCustomer {
    std::string customer_id;
    std::vector<double> purchase_times;       // exact, <= horizon + holdout
    std::vector<std::int64_t> purchase_days;  // floored, distinct, <= horizon
    CustomerSummary summary;                  // floored-day frame; what ingest reproduces
    CustomerSummary exact_summary;            // continuous frame: repeat count, exact t_x
    int holdout_zero;                         // 1/0, or -1 (NA) when holdout = 0
};

struct Cohort {
    SimulationConfig config;
    std::vector<SimulatedCustomer> customers;

    // as-of day for the transaction log: floor(horizon) days after day 0
    std::int64_t as_of_day() const;
};

// Deterministic for a fixed seed regardless of evaluation order.
// Purchase times are floored to integer days for emission; exact times
// are kept on each customer for oracle comparisons.
Cohort simulate_cohort(const SimulationConfig& config);

// File emission. Day 0 maps to kSimulationEpoch; the transaction file is
// the same format ingest consumes, the ground-truth file carries
// customer_id,x,t_x,T,holdout_zero with holdout_zero in {0,1,NA}.
inline constexpr Date kSimulationEpoch{2020, 1, 1};

void write_transactions(std::ostream& out, const Cohort& cohort);
void write_ground_truth(std::ostream& out, const Cohort& cohort);

} // namespace bgnbd

#endif
