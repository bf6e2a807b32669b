#include "r2c/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "r2c/baseline.hpp"
#include "r2c/csv.hpp"

namespace r2c {

namespace {

using Json = nlohmann::ordered_json;

Json reference_block(const std::string& name) {
    // Published reference results for side-by-side comparison in reports.
    if (name == "banknote") {
        return Json{
            {"dataset", "banknote"},
            {"plateau_u", 0.36},
            {"classes", {"counterfeit", "genuine"}},
            {"rc_confusion", {{99, 0}, {1, 100}}},
            {"gmm_confusion", {{16, 2}, {0, 98}, {84, 0}}},
        };
    }
    if (name == "wine") {
        return Json{
            {"dataset", "wine"},
            {"plateau_u", 0.105},
            {"classes", {"barbera", "grignolino", "barolo"}},
            {"rc_confusion", {{42, 9, 5}, {1, 56, 16}, {5, 7, 37}}},
            {"gmm_confusion", {{0, 27, 59}, {48, 44, 0}}},
        };
    }
    throw ConfigError("unknown reference dataset: " + name);
}

Json mixture_json(const FitResult& fit) {
    Json m;
    m["k"] = fit.model.size();
    m["weights"] = fit.model.weights;
    m["means"] = fit.model.means;
    m["variances"] = fit.model.variances;
    m["loglik"] = fit.loglik;
    m["bic"] = fit.bic;
    return m;
}

Json conquer_table_json(const ConquerFunction& cf) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < cf.levels(); ++i) {
        rows.push_back(Json{{"level", cf.level(i)},
                            {"jump", cf.cells_at_level[i]},
                            {"c_value", cf.value(cf.level(i))}});
    }
    return rows;
}

Json contingency_json(const ContingencyTable& table) {
    Json j;
    j["cluster_values"] = table.row_values;
    j["truth_values"] = table.col_values;
    Json rows = Json::array();
    for (std::size_t i = 0; i < table.row_values.size(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < table.col_values.size(); ++c) row.push_back(table.at(i, c));
        rows.push_back(row);
    }
    j["counts"] = rows;
    return j;
}

std::string policy_label(const SievePolicy& policy) {
    if (policy.kind != SievePolicy::Kind::fixed) return policy.name();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fixed_u%g", policy.u);
    return buf;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::size_t mode_smallest(const std::vector<std::size_t>& values) {
    std::map<std::size_t, std::size_t> freq;
    for (auto v : values) ++freq[v];
    std::size_t best = 0, best_count = 0;
    for (const auto& [value, count] : freq)
        if (count > best_count) {  // map order: ties keep the smallest value
            best = value;
            best_count = count;
        }
    return best;
}

}  // namespace

R2cResult run_fit(const FitOptions& options) {
    const CsvTable table = read_numeric_csv(options.input_path);
    R2cConfig config;
    config.fit = options.fit;
    config.policy = options.policy;
    config.threads = options.threads;
    R2cResult result = r2c_cluster(table.values, config);
    const auto& report = result.report;

    namespace fs = std::filesystem;
    fs::create_directories(options.output_dir);
    const auto out = [&](const std::string& name) { return (fs::path(options.output_dir) / name).string(); };

    {
        std::ofstream labels(out("labels.csv"));
        labels << "row_index,label\n";
        for (std::size_t i = 0; i < result.labels.size(); ++i)
            labels << i << "," << result.labels[i] << "\n";
    }
    {
        std::ofstream marginal(out("marginal_labels.csv"));
        marginal << "row_index";
        for (std::size_t j = 0; j < report.marginal_labels.size(); ++j)
            marginal << ",label_margin_" << j + 1;
        marginal << "\n";
        for (std::size_t i = 0; i < result.labels.size(); ++i) {
            marginal << i;
            for (const auto& margin : report.marginal_labels) marginal << "," << margin[i];
            marginal << "\n";
        }
    }
    {
        std::ofstream conquer(out("conquer.csv"));
        conquer << "level,jump,c_value\n";
        for (std::size_t i = 0; i < report.conquer_fn.levels(); ++i)
            conquer << format_double(report.conquer_fn.level(i)) << ","
                    << report.conquer_fn.cells_at_level[i] << ","
                    << report.conquer_fn.value(report.conquer_fn.level(i)) << "\n";
    }

    Json j;
    j["input"] = options.input_path;
    j["n"] = table.values.rows();
    j["d"] = table.values.cols();
    j["policy"] = options.policy.name();
    if (options.policy.kind == SievePolicy::Kind::fixed)
        j["fixed_u"] = options.policy.u;
    j["u_selected"] = report.sieve.u;
    j["boundary_kept"] = report.sieve.keep_boundary;
    j["margin_k"] = report.margin_k();
    Json margins = Json::array();
    for (const auto& fit : report.margin_fits) margins.push_back(mixture_json(fit));
    j["margins"] = margins;
    j["conquering_function"] = Json{{"total_cells", report.conquer_fn.total_cells},
                                    {"nonempty_cells", report.conquer_fn.nonempty_cells},
                                    {"table", conquer_table_json(report.conquer_fn)}};
    Json survivors = Json::array();
    for (std::size_t s = 0; s < report.conquer.final_k(); ++s) {
        const auto cell = report.grid.unravel(report.conquer.survivor_cells[s]);
        Json entry;
        entry["cell"] = cell;
        const auto center = report.conquer.survivor_centers.row(s);
        entry["center"] = std::vector<double>(center.begin(), center.end());
        entry["mass"] = report.masses.mass(report.conquer.survivor_cells[s]);
        survivors.push_back(entry);
    }
    j["survivors"] = survivors;
    j["final_k"] = report.conquer.final_k();
    j["fallback_applied"] = report.conquer.fallback_applied;
    j["warnings"] = report.warnings;
    j["runtime_seconds"] = report.runtime_seconds;

    if (!options.truth_path.empty()) {
        const std::vector<int> truth = read_labels_csv(options.truth_path);
        if (truth.size() != result.labels.size())
            throw LengthMismatch("truth labels length does not match the data");
        j["confusion_matrix"] = contingency_json(confusion_matrix(result.labels, truth));
        const AgreementMetrics m = agreement_metrics(result.labels, truth);
        j["metrics"] = Json{{"ri", m.ri}, {"ari", m.ari}, {"ji", m.ji}, {"fmi", m.fmi}};
    }
    if (!options.reference.empty()) j["reference"] = reference_block(options.reference);

    std::ofstream report_file(out("report.json"));
    report_file << j.dump(2) << "\n";
    return result;
}

void run_simulate(const SimulateOptions& options) {
    const LabeledSample sample = generate_scenario(options.spec);
    std::vector<std::string> header;
    for (std::size_t j = 0; j < sample.points.cols(); ++j)
        header.push_back("x" + std::to_string(j + 1));
    write_csv(options.output_path, header, sample.points);
    if (!options.labels_path.empty()) {
        std::ofstream labels(options.labels_path);
        if (!labels) throw ConfigError("cannot open output file: " + options.labels_path);
        labels << "row_index,label\n";
        for (std::size_t i = 0; i < sample.labels.size(); ++i)
            labels << i << "," << sample.labels[i] << "\n";
    }
}

BenchResult run_bench(const BenchOptions& options) {
    if (options.reps == 0) throw ConfigError("run_bench: reps must be at least 1");
    std::vector<std::size_t> sizes = options.sizes;
    if (sizes.empty())
        sizes = options.scenario == Scenario::s3 ? std::vector<std::size_t>{5, 10, 15, 20}
                                                 : std::vector<std::size_t>{50, 100, 250, 500, 1000};
    std::vector<SievePolicy> policies = options.policies;
    if (policies.empty())
        policies = {SievePolicy::fixed(0.1), SievePolicy::plateau(), SievePolicy::edge()};

    struct Task {
        std::size_t size_idx;
        std::size_t rep;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < sizes.size(); ++s)
        for (std::size_t rep = 0; rep < options.reps; ++rep) tasks.push_back({s, rep});

    // rows[task][policy]; filled in parallel, serialized in fixed order.
    std::vector<std::vector<BenchRow>> rows(tasks.size());

    parallel_for(tasks.size(), options.threads, [&](std::size_t t) {
        const Task& task = tasks[t];
        ScenarioSpec spec;
        spec.variant = options.scenario;
        spec.theta = options.theta;
        if (options.scenario == Scenario::s3) {
            spec.d = sizes[task.size_idx];
            spec.n = 0;  // derived from d
        } else {
            spec.n = sizes[task.size_idx];
        }
        spec.seed = mix_seed(options.seed, task.size_idx * 1000003ULL + task.rep);
        const LabeledSample sample = generate_scenario(spec);

        // Fit margins and masses once; policies differ only in the sieve.
        R2cConfig config;
        config.fit = options.fit;
        config.fit.seed = mix_seed(spec.seed, 0xf17);
        config.threads = 1;

        const std::size_t d = sample.points.cols();
        std::vector<UnivariateGaussianMixture> margins(d);
        for (std::size_t j = 0; j < d; ++j) {
            FitConfig margin_config = config.fit;
            margin_config.seed = config.fit.seed ^ static_cast<std::uint64_t>(j);
            margins[j] = select_k(sample.points.column(j), margin_config).model;
        }
        const ProtoGrid grid = build_grid(margins);
        const MassTable masses = estimate_masses(sample.points, grid);
        const ConquerFunction cf = conquering_function(masses, grid.index_set_size());

        double baseline_ari = std::numeric_limits<double>::quiet_NaN();
        int baseline_k = -1;
        if (options.baseline) {
            FitConfig joint_config = config.fit;
            joint_config.seed = mix_seed(spec.seed, 0x6a3);
            const JointFitResult joint =
                fit_gmm_joint(sample.points, options.fit.k_max, joint_config);
            baseline_ari = agreement_metrics(joint.labels, sample.labels).ari;
            baseline_k = static_cast<int>(joint.model.size());
        }

        auto& out = rows[t];
        out.reserve(policies.size());
        for (const auto& policy : policies) {
            const SieveSelection sieve = select_sieve(cf, policy);
            const ConquerResult conquer =
                surviving_centers(masses, grid, sieve.u, sieve.keep_boundary);
            std::vector<int> labels(sample.points.rows());
            for (std::size_t i = 0; i < sample.points.rows(); ++i)
                labels[i] = static_cast<int>(encode(sample.points.row(i), conquer));

            BenchRow row;
            row.replicate = task.rep;
            row.size = sizes[task.size_idx];
            row.policy = policy_label(policy);
            row.metrics = agreement_metrics(labels, sample.labels);
            row.final_k = conquer.final_k();
            row.baseline_ari = baseline_ari;
            row.baseline_k = baseline_k;
            out.push_back(std::move(row));
        }
    });

    BenchResult result;
    std::ostringstream csv;
    const char* size_name = options.scenario == Scenario::s3 ? "d" : "n";
    csv << "replicate," << size_name << ",policy,ari,ri,ji,fmi,final_k,baseline_ari,baseline_k\n";
    for (const auto& task_rows : rows)
        for (const auto& row : task_rows) {
            result.rows.push_back(row);
            csv << row.replicate << "," << row.size << "," << row.policy << ","
                << format_double(row.metrics.ari) << "," << format_double(row.metrics.ri) << ","
                << format_double(row.metrics.ji) << "," << format_double(row.metrics.fmi) << ","
                << row.final_k << "," << format_double(row.baseline_ari) << ","
                << row.baseline_k << "\n";
        }

    // Aggregate summary: one row per (size, policy), replicate column = "median";
    // final_k and baseline_k report the modal value.
    for (std::size_t s = 0; s < sizes.size(); ++s)
        for (const auto& policy : policies) {
            const std::string policy_name = policy_label(policy);
            std::vector<double> ari, ri, ji, fmi, bari;
            std::vector<std::size_t> ks, bks;
            for (const auto& row : result.rows)
                if (row.size == sizes[s] && row.policy == policy_name) {
                    ari.push_back(row.metrics.ari);
                    ri.push_back(row.metrics.ri);
                    ji.push_back(row.metrics.ji);
                    fmi.push_back(row.metrics.fmi);
                    ks.push_back(row.final_k);
                    if (row.baseline_k >= 0) {
                        bari.push_back(row.baseline_ari);
                        bks.push_back(static_cast<std::size_t>(row.baseline_k));
                    }
                }
            csv << "median," << sizes[s] << "," << policy_name << "," << format_double(median(ari))
                << "," << format_double(median(ri)) << "," << format_double(median(ji)) << ","
                << format_double(median(fmi)) << "," << mode_smallest(ks) << ","
                << format_double(median(bari)) << ","
                << (bks.empty() ? std::string("-1") : std::to_string(mode_smallest(bks))) << "\n";
        }

    result.csv = csv.str();
    return result;
}

}  // namespace r2c
