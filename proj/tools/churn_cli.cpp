// churn: batch BG/NBD churn scoring under the "no purchases within M
// days" definition. Subcommands: ingest, fit, score, simulate, check.
//
// Exit codes: 0 ok, 2 usage/parse error, 3 identifiability error,
// 4 numerical-consistency failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgnbd/fit.hpp"
#include "bgnbd/ingest.hpp"
#include "bgnbd/model.hpp"
#include "bgnbd/simulate.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIdentifiability = 3;
constexpr int kExitConsistency = 4;

// 10 significant digits, fixed notation, never fewer than 10 decimals;
// the glibc binary-to-decimal conversion rounds half to even.
std::string format_probability(double p)
{
    int decimals = 10;
    if (p > 0.0) {
        const int exponent = static_cast<int>(std::floor(std::log10(p)));
        decimals = std::max(10, 9 - exponent);
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, p);
    return buffer;
}

std::string format_days(double d)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.10g", d);
    return buffer;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    return out;
}

void write_params_file(const std::string& path, const bgnbd::ModelParams& params,
                       const std::optional<std::string>& fitted_on)
{
    nlohmann::json doc{{"r", params.r},
                       {"alpha", params.alpha},
                       {"a", params.a},
                       {"b", params.b},
                       {"tool_version", kToolVersion}};
    if (fitted_on) {
        doc["fitted_on"] = *fitted_on;
    }
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

bgnbd::ModelParams read_params_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open params file '" + path + "'");
    }
    const nlohmann::json doc = nlohmann::json::parse(in);
    for (const char* key : {"r", "alpha", "a", "b"}) {
        if (!doc.contains(key) || !doc[key].is_number()) {
            throw std::runtime_error("params file '" + path + "' is missing numeric field '" +
                                     std::string(key) + "'");
        }
    }
    bgnbd::ModelParams params{doc["r"].get<double>(), doc["alpha"].get<double>(),
                              doc["a"].get<double>(), doc["b"].get<double>()};
    params.validate();
    return params;
}

int run_ingest(const std::string& transactions_path, const std::string& as_of_text,
               const std::string& output_path)
{
    const bgnbd::Date as_of = bgnbd::Date::parse(as_of_text);
    const auto records = bgnbd::read_transactions_file(transactions_path);
    const auto histories = bgnbd::aggregate_daily(records);

    std::vector<bgnbd::NamedSummary> summaries;
    summaries.reserve(histories.size());
    for (const auto& history : histories) {
        summaries.push_back({history.customer_id, bgnbd::summarize(history, as_of)});
    }
    auto out = open_output(output_path);
    bgnbd::write_summaries(out, summaries);
    std::cout << "wrote " << summaries.size() << " customer summaries to " << output_path
              << "\n";
    return kExitOk;
}

int run_fit(const std::string& input_path, const std::string& output_path,
            const std::optional<std::vector<double>>& init, std::int64_t max_iter,
            std::optional<double> tol)
{
    const auto rows = bgnbd::read_summaries_file(input_path);
    std::vector<bgnbd::CustomerSummary> summaries;
    summaries.reserve(rows.size());
    for (const auto& row : rows) summaries.push_back(row.summary);

    bgnbd::FitConfig config;
    if (init) {
        config.initial_params = {(*init)[0], (*init)[1], (*init)[2], (*init)[3]};
    }
    config.max_iterations = max_iter;
    if (tol) {
        config.objective_tolerance = *tol;
        config.parameter_tolerance = *tol;
    }

    const bgnbd::FitReport report = bgnbd::fit(summaries, config);
    write_params_file(output_path, report.params, input_path);

    std::cout << "neg_log_likelihood=" << format_days(report.neg_log_likelihood)
              << " iterations=" << report.iterations
              << " converged=" << (report.converged ? "true" : "false")
              << " evaluations=" << report.objective_evaluations << "\n";
    if (!report.converged) {
        std::cerr << "warning: optimizer hit the iteration cap before converging; "
                     "results written anyway\n";
    }
    return kExitOk;
}

int run_score(const std::string& params_path, const std::string& input_path,
              double window, const std::string& output_path)
{
    const bgnbd::ModelParams params = read_params_file(params_path);
    const bgnbd::ChurnQuery query{window};
    query.validate();
    const auto rows = bgnbd::read_summaries_file(input_path);

    auto out = open_output(output_path);
    out << "customer_id,effective_horizon,churn_probability,already_churned\n";
    for (const auto& row : rows) {
        const bgnbd::ChurnScore score =
            bgnbd::churn_probability_window(params, row.summary, query);
        out << row.customer_id << ',' << format_days(score.effective_horizon) << ','
            << format_probability(score.probability) << ','
            << (score.already_churned ? 1 : 0) << '\n';
    }
    std::cout << "scored " << rows.size() << " customers to " << output_path << "\n";
    return kExitOk;
}

int run_simulate(const bgnbd::SimulationConfig& config, const std::string& prefix)
{
    const bgnbd::Cohort cohort = bgnbd::simulate_cohort(config);

    const std::string transactions_path = prefix + "_transactions.csv";
    const std::string truth_path = prefix + "_truth.csv";
    {
        auto out = open_output(transactions_path);
        bgnbd::write_transactions(out, cohort);
    }
    {
        auto out = open_output(truth_path);
        bgnbd::write_ground_truth(out, cohort);
    }
    const bgnbd::Date as_of =
        bgnbd::Date::from_days(bgnbd::kSimulationEpoch.to_days() + cohort.as_of_day());
    std::cout << "wrote " << transactions_path << " and " << truth_path
              << " (as-of date " << as_of.to_string() << ")\n";
    return kExitOk;
}

int run_check(const std::string& params_path, std::int64_t grid_size, std::uint64_t seed)
{
    bgnbd::ModelParams params{0.5, 6.0, 0.9, 2.5};
    if (!params_path.empty()) {
        params = read_params_file(params_path);
    }

    const std::int64_t x_grid[] = {0, 1, 5, 20, 50, 100, 500, 10000};
    bgnbd::RngStream rng(seed, 0);

    double max_discrepancy = 0.0;
    std::int64_t compared = 0;
    std::int64_t reference_failures = 0;
    for (std::int64_t x : x_grid) {
        for (std::int64_t i = 0; i < grid_size; ++i) {
            const double t_x = x == 0 ? 0.0 : std::floor(rng.uniform01() * 1500.0);
            const double T = t_x + std::floor(rng.uniform01() * 400.0);
            const double t = 1.0 + rng.uniform01() * 364.0;
            const bgnbd::CustomerSummary summary{x, t_x, T};

            const double stable = bgnbd::churn_probability(params, summary, t);
            if (!std::isfinite(stable) || stable < 0.0 || stable > 1.0) {
                std::cerr << "stable path produced " << stable << " at x=" << x
                          << " t_x=" << t_x << " T=" << T << " t=" << t << "\n";
                return kExitConsistency;
            }
            try {
                const double reference =
                    bgnbd::churn_probability_reference(params, summary, t);
                const double discrepancy = std::abs(stable - reference);
                ++compared;
                if (discrepancy > max_discrepancy) max_discrepancy = discrepancy;
                if (discrepancy > 1e-10) {
                    std::cerr << "stable/reference discrepancy " << discrepancy
                              << " at x=" << x << " t_x=" << t_x << " T=" << T
                              << " t=" << t << "\n";
                    return kExitConsistency;
                }
            } catch (const bgnbd::NumericRangeError&) {
                ++reference_failures; // stable value above already vetted
            }
        }
    }
    std::cout << "checked " << compared + reference_failures << " tuples: max |stable-reference| = "
              << max_discrepancy << " over " << compared << " comparable, "
              << reference_failures << " reference range failures (stable path finite throughout)\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"BG/NBD churn scoring under an M-day inactivity window"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "aggregate a transaction log into summaries");
    std::string transactions_path, as_of_text, ingest_output;
    ingest->add_option("--transactions", transactions_path, "transaction CSV")->required();
    ingest->add_option("--as-of", as_of_text, "scoring date YYYY-MM-DD")->required();
    ingest->add_option("--output", ingest_output, "summary CSV to write")->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit r, alpha, a, b by maximum likelihood");
    std::string fit_input, fit_output;
    std::vector<double> init_values;
    std::int64_t max_iter = 10000;
    double tol_value = 0.0;
    fit_cmd->add_option("--input", fit_input, "summary CSV")->required();
    fit_cmd->add_option("--output", fit_output, "params JSON to write")->required();
    auto* init_opt = fit_cmd->add_option("--init", init_values, "initial r,alpha,a,b")
                         ->delimiter(',')
                         ->expected(4);
    fit_cmd->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
    auto* tol_opt =
        fit_cmd->add_option("--tol", tol_value, "convergence tolerance")->check(CLI::PositiveNumber);

    // score
    auto* score = app.add_subcommand("score", "compute churn probabilities");
    std::string score_params, score_input, score_output;
    double window = 0.0;
    score->add_option("--params", score_params, "params JSON")->required();
    score->add_option("--input", score_input, "summary CSV")->required();
    score->add_option("--window", window, "churn window M in days")
        ->required()
        ->check(CLI::PositiveNumber);
    score->add_option("--output", score_output, "score CSV to write")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic cohort");
    bgnbd::SimulationConfig sim_config{{1.0, 1.0, 1.0, 1.0}, 1000, 365.0, 0.0, 0, false};
    std::string sim_prefix;
    simulate->add_option("--r", sim_config.params.r)->required();
    simulate->add_option("--alpha", sim_config.params.alpha)->required();
    simulate->add_option("--a", sim_config.params.a)->required();
    simulate->add_option("--b", sim_config.params.b)->required();
    simulate->add_option("--customers", sim_config.num_customers)->required();
    simulate->add_option("--horizon", sim_config.horizon, "observation days")->required();
    simulate->add_option("--holdout", sim_config.holdout, "extra days past the horizon");
    simulate->add_option("--seed", sim_config.seed)->required();
    simulate->add_option("--output", sim_prefix, "output file prefix")->required();

    // check
    auto* check = app.add_subcommand("check", "stable vs reference evaluator sweep");
    std::string check_params;
    std::int64_t grid_size = 200;
    std::uint64_t check_seed = 42;
    check->add_option("--params", check_params, "params JSON (built-in defaults if omitted)");
    check->add_option("--grid-size", grid_size, "random tuples per x value");
    check->add_option("--seed", check_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            return app.exit(e);
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ingest) {
            return run_ingest(transactions_path, as_of_text, ingest_output);
        }
        if (*fit_cmd) {
            std::optional<std::vector<double>> init;
            if (init_opt->count() > 0) init = init_values;
            std::optional<double> tol;
            if (tol_opt->count() > 0) tol = tol_value;
            return run_fit(fit_input, fit_output, init, max_iter, tol);
        }
        if (*score) {
            return run_score(score_params, score_input, window, score_output);
        }
        if (*simulate) {
            return run_simulate(sim_config, sim_prefix);
        }
        if (*check) {
            if (grid_size < 1) {
                std::cerr << "error: --grid-size must be >= 1\n";
                return kExitUsage;
            }
            return run_check(check_params, grid_size, check_seed);
        }
    } catch (const bgnbd::IdentifiabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIdentifiability;
    } catch (const bgnbd::NumericRangeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConsistency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
