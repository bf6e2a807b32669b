#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "r2c/csv.hpp"
#include "r2c/metrics.hpp"
#include "r2c/pipeline.hpp"

namespace {

r2c::SievePolicy parse_policy(const std::string& name, double u) {
    if (name == "fixed") return r2c::SievePolicy::fixed(u);
    if (name == "plateau") return r2c::SievePolicy::plateau();
    if (name == "edge") return r2c::SievePolicy::edge();
    throw r2c::ConfigError("unknown policy: " + name);
}

r2c::Scenario parse_scenario(const std::string& name) {
    if (name == "s1") return r2c::Scenario::s1;
    if (name == "s2") return r2c::Scenario::s2;
    if (name == "s3") return r2c::Scenario::s3;
    throw r2c::ConfigError("unknown scenario: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reign-and-conquer clustering: per-margin mixtures, protocluster grids, "
                 "sieve-based conquering and nearest-center encoding"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "Cluster a CSV file");
    std::string fit_input, fit_output = "r2c_out", fit_policy = "fixed", fit_truth, fit_reference;
    double fit_u = 0.1;
    std::size_t fit_kmax = 6, fit_restarts = 8;
    std::uint64_t fit_seed = 0;
    unsigned fit_threads = 0;
    fit->add_option("--input", fit_input, "Input CSV (optional header row)")->required();
    fit->add_option("--output-dir", fit_output, "Output directory");
    fit->add_option("--policy", fit_policy, "Sieve policy: fixed|plateau|edge")
        ->check(CLI::IsMember({"fixed", "plateau", "edge"}));
    fit->add_option("--u", fit_u, "Sieve size for --policy fixed");
    fit->add_option("--kmax", fit_kmax, "Maximum components per margin");
    fit->add_option("--restarts", fit_restarts, "EM restarts per candidate k");
    fit->add_option("--seed", fit_seed, "RNG seed");
    fit->add_option("--threads", fit_threads, "Worker threads (0 = all cores)");
    fit->add_option("--truth", fit_truth, "Ground-truth labels CSV; adds confusion matrix");
    fit->add_option("--reference", fit_reference,
                    "Embed published reference results (banknote|wine) in the report")
        ->check(CLI::IsMember({"banknote", "wine"}));

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a scenario sample");
    std::string sim_scenario = "s1", sim_output = "sample.csv", sim_labels;
    std::size_t sim_n = 0, sim_d = 2;
    double sim_theta = 2.0;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--scenario", sim_scenario, "s1|s2|s3")
        ->check(CLI::IsMember({"s1", "s2", "s3"}));
    simulate->add_option("--n", sim_n, "Sample size (s3 derives it from d when omitted)");
    simulate->add_option("--d", sim_d, "Dimension (s3 only)");
    simulate->add_option("--theta", sim_theta, "Clayton dependence (s2 only)");
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--output", sim_output, "Output CSV for the data matrix");
    simulate->add_option("--labels", sim_labels, "Optional output CSV for generating labels");

    // bench
    auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark over a scenario");
    std::string bench_scenario = "s1", bench_output, bench_policies = "fixed,plateau,edge";
    std::vector<std::size_t> bench_sizes;
    std::size_t bench_reps = 50, bench_kmax = 6, bench_restarts = 8;
    double bench_u = 0.1, bench_theta = 2.0;
    std::uint64_t bench_seed = 0;
    unsigned bench_threads = 0;
    bool bench_baseline = false;
    bench->add_option("--scenario", bench_scenario, "s1|s2|s3")
        ->check(CLI::IsMember({"s1", "s2", "s3"}));
    bench->add_option("--reps", bench_reps, "Replicates per size");
    bench->add_option("--sizes", bench_sizes, "n values (s1/s2) or d values (s3)");
    bench->add_option("--policies", bench_policies, "Comma-separated: fixed,plateau,edge");
    bench->add_option("--u", bench_u, "Sieve size for the fixed policy");
    bench->add_option("--theta", bench_theta, "Clayton dependence (s2)");
    bench->add_option("--kmax", bench_kmax, "Maximum components per margin");
    bench->add_option("--restarts", bench_restarts, "EM restarts per candidate k");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--threads", bench_threads, "Worker threads (0 = all cores)");
    bench->add_flag("--baseline", bench_baseline, "Also fit the joint GMM comparator");
    bench->add_option("--output", bench_output, "Output CSV path (default: stdout)");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Agreement metrics between two labelings");
    std::string metrics_a, metrics_b;
    metrics->add_option("--labels-a", metrics_a, "First labels CSV")->required();
    metrics->add_option("--labels-b", metrics_b, "Second labels CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            r2c::FitOptions options;
            options.input_path = fit_input;
            options.output_dir = fit_output;
            options.policy = parse_policy(fit_policy, fit_u);
            options.fit.k_max = fit_kmax;
            options.fit.restarts = fit_restarts;
            options.fit.seed = fit_seed;
            options.threads = fit_threads;
            options.truth_path = fit_truth;
            options.reference = fit_reference;
            const r2c::R2cResult result = r2c::run_fit(options);
            std::cout << "final_k=" << result.report.conquer.final_k()
                      << " u=" << r2c::format_double(result.report.sieve.u)
                      << " margins_k=";
            const auto ks = result.report.margin_k();
            for (std::size_t j = 0; j < ks.size(); ++j)
                std::cout << (j ? "," : "") << ks[j];
            std::cout << " outputs=" << fit_output << "\n";
        } else if (*simulate) {
            r2c::SimulateOptions options;
            options.spec.variant = parse_scenario(sim_scenario);
            options.spec.n = sim_n;
            options.spec.d = sim_d;
            options.spec.theta = sim_theta;
            options.spec.seed = sim_seed;
            options.output_path = sim_output;
            options.labels_path = sim_labels;
            r2c::run_simulate(options);
        } else if (*bench) {
            r2c::BenchOptions options;
            options.scenario = parse_scenario(bench_scenario);
            options.sizes = bench_sizes;
            options.reps = bench_reps;
            options.theta = bench_theta;
            options.seed = bench_seed;
            options.threads = bench_threads;
            options.baseline = bench_baseline;
            options.fit.k_max = bench_kmax;
            options.fit.restarts = bench_restarts;
            std::stringstream names(bench_policies);
            std::string name;
            while (std::getline(names, name, ','))
                if (!name.empty()) options.policies.push_back(parse_policy(name, bench_u));
            const r2c::BenchResult result = r2c::run_bench(options);
            if (bench_output.empty()) {
                std::cout << result.csv;
            } else {
                std::ofstream out(bench_output);
                if (!out) throw r2c::ConfigError("cannot open output file: " + bench_output);
                out << result.csv;
            }
        } else if (*metrics) {
            const std::vector<int> a = r2c::read_labels_csv(metrics_a);
            const std::vector<int> b = r2c::read_labels_csv(metrics_b);
            const r2c::AgreementMetrics m = r2c::agreement_metrics(a, b);
            std::cout << "ri,ari,ji,fmi\n"
                      << r2c::format_double(m.ri) << "," << r2c::format_double(m.ari) << ","
                      << r2c::format_double(m.ji) << "," << r2c::format_double(m.fmi) << "\n";
        }
    } catch (const r2c::ParseError& e) {
        std::cerr << "parse error (line " << e.line << ", column " << e.column << "): " << e.what()
                  << "\n";
        return 2;
    } catch (const r2c::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::InvalidSpec& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::InvalidTheta& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::LengthMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::DimensionMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::TooFewObservations& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const r2c::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
