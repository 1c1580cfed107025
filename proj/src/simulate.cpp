#include "bgnbd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bgnbd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string customer_id_for(std::int64_t index, std::int64_t cohort_size)
{
    int width = 6;
    for (std::int64_t n = cohort_size; n >= 10000000; n /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return "c" + std::string(width - std::min<int>(width, digits.size()), '0') + digits;
}

} // namespace

void SimulationConfig::validate() const
{
    params.validate();
    if (num_customers < 1) {
        throw std::invalid_argument("SimulationConfig: num_customers must be >= 1");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("SimulationConfig: horizon must be positive and finite");
    }
    if (!(holdout >= 0.0) || !std::isfinite(holdout)) {
        throw std::invalid_argument("SimulationConfig: holdout must be >= 0 and finite");
    }
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t state = seed;
    splitmix64(state);
    state ^= 0xD1B54A32D192ED03ULL * (index + 1);
    engine_.seed(splitmix64(state));
}

double RngStream::uniform01()
{
    // 53-bit mantissa, shifted into (0, 1)
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal01()
{
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_normal_ = true;
    return u * factor;
}

double RngStream::gamma(double shape, double rate)
{
    if (shape < 1.0) {
        // boost to shape + 1, then scale by U^{1/shape}
        const double boosted = gamma(shape + 1.0, rate);
        return boosted * std::pow(uniform01(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double z, v;
        do {
            z = normal01();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2 ||
            std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
            return d * v / rate;
        }
    }
}

double RngStream::beta(double a, double b)
{
    const double ga = gamma(a, 1.0);
    const double gb = gamma(b, 1.0);
    return ga / (ga + gb);
}

double RngStream::exponential(double rate)
{
    return -std::log(uniform01()) / rate;
}

std::vector<double> sample_customer(const ModelParams& params, double horizon,
                                    double holdout, RngStream& rng,
                                    bool disable_dropout)
{
    params.validate();
    const double lambda = rng.gamma(params.r, params.alpha);
    const double p = disable_dropout ? 0.0 : rng.beta(params.a, params.b);
    const double end = horizon + holdout;

    std::vector<double> times{0.0};
    if (lambda <= 0.0) {
        return times; // degenerate draw; no repeat purchase can ever arrive
    }
    double now = 0.0;
    while (true) {
        now += rng.exponential(lambda);
        if (now > end) break;
        times.push_back(now);
        // dropout is evaluated after repeat purchases only
        if (p > 0.0 && rng.uniform01() < p) break;
    }
    return times;
}

std::int64_t Cohort::as_of_day() const
{
    return static_cast<std::int64_t>(std::floor(config.horizon));
}

Cohort simulate_cohort(const SimulationConfig& config)
{
    config.validate();
    Cohort cohort{config, {}};
    cohort.customers.reserve(config.num_customers);
    const std::int64_t horizon_day = cohort.as_of_day();

    for (std::int64_t i = 0; i < config.num_customers; ++i) {
        RngStream rng(config.seed, static_cast<std::uint64_t>(i));
        std::vector<double> times = sample_customer(config.params, config.horizon,
                                                    config.holdout, rng,
                                                    config.disable_dropout);

        std::vector<std::int64_t> days;
        std::int64_t observed_purchases = 0;
        double exact_last = 0.0;
        bool holdout_purchase = false;
        for (double time : times) {
            if (time <= config.horizon) {
                days.push_back(static_cast<std::int64_t>(std::floor(time)));
                ++observed_purchases;
                exact_last = time;
            } else {
                holdout_purchase = true;
            }
        }
        days.erase(std::unique(days.begin(), days.end()), days.end());

        CustomerSummary summary{static_cast<std::int64_t>(days.size()) - 1,
                                static_cast<double>(days.back()),
                                static_cast<double>(horizon_day)};
        CustomerSummary exact_summary{observed_purchases - 1,
                                      observed_purchases > 1 ? exact_last : 0.0,
                                      config.horizon};
        const int holdout_zero = config.holdout > 0.0 ? (holdout_purchase ? 0 : 1) : -1;

        cohort.customers.push_back(
            SimulatedCustomer{customer_id_for(i, config.num_customers), std::move(times),
                              std::move(days), summary, exact_summary, holdout_zero});
    }
    return cohort;
}

void write_transactions(std::ostream& out, const Cohort& cohort)
{
    const std::int64_t epoch = kSimulationEpoch.to_days();
    out << "customer_id,purchase_date\n";
    for (const SimulatedCustomer& customer : cohort.customers) {
        for (double time : customer.purchase_times) {
            if (time > cohort.config.horizon) continue;
            const std::int64_t day = static_cast<std::int64_t>(std::floor(time));
            out << customer.customer_id << ','
                << Date::from_days(epoch + day).to_string() << '\n';
        }
    }
}

void write_ground_truth(std::ostream& out, const Cohort& cohort)
{
    out << "customer_id,x,t_x,T,holdout_zero\n";
    for (const SimulatedCustomer& customer : cohort.customers) {
        out << customer.customer_id << ',' << customer.summary.x << ','
            << static_cast<std::int64_t>(customer.summary.t_x) << ','
            << static_cast<std::int64_t>(customer.summary.T) << ',';
        if (customer.holdout_zero < 0) {
            out << "NA";
        } else {
            out << customer.holdout_zero;
        }
        out << '\n';
    }
}

} // namespace bgnbd
