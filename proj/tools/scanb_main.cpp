#include "scanb/calibration.hpp"
#include "scanb/csv.hpp"
#include "scanb/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

using json = nlohmann::json;
using namespace scanb;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CalibrateArgs {
    double arl = 5000.0;
    int b0 = 20;
};

int cmd_calibrate(const CalibrateArgs& args) {
    const double b = threshold_for_arl(args.arl, args.b0);
    std::cout.precision(10);
    std::cout << "threshold=" << b << "\n";
    std::cout << "arl_check=" << arl_approx(b, args.b0) << "\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string case_name = "case1-mean-shift";
    long tau = 0;
    long length = 0;
    std::uint64_t seed = 1;
    int dimension = 0;
    bool header = false;
    std::string out_path;
};

int cmd_generate(const GenerateArgs& args) {
    StreamSpec spec;
    spec.case_id = case_from_string(args.case_name);
    spec.dimension = case_dimension(spec.case_id);
    if (spec.dimension == 0) spec.dimension = args.dimension > 0 ? args.dimension : 10;
    spec.tau = args.tau;
    spec.length = args.length;
    spec.seed = args.seed;
    spec.validate();
    write_sample_csv(args.out_path, generate(spec), args.header);
    std::cout << "seed=" << args.seed << "\n";
    std::cout << "rows=" << spec.length << "\n";
    return kExitOk;
}

struct DetectArgs {
    std::string stream_path;
    std::string pool_path;
    int b0 = 20;
    int n = 5;
    std::string kernel = "gaussian-rbf";
    double sigma = 0.0;  // 0 = median heuristic
    double sigma_multiplier = 1.0;
    double threshold = 0.0;  // 0 = derive from --arl
    double arl = 5000.0;
    std::uint64_t seed = 1;
    int tuple_budget = 2000;
    std::string subsampling = "random";
};

int cmd_detect(const DetectArgs& args) {
    ReferencePool pool;
    pool.samples = read_sample_csv(args.pool_path);
    pool.rng_seed = args.seed;
    const std::vector<Sample> stream = read_sample_csv(args.stream_path);
    if (pool.samples.empty()) throw InputError("reference pool is empty: " + args.pool_path);
    if (!stream.empty() && stream.front().size() != pool.dimension()) {
        throw InputError("stream dimension " + std::to_string(stream.front().size()) +
                         " does not match pool dimension " +
                         std::to_string(pool.dimension()));
    }

    DetectorConfig config;
    config.block_size = args.b0;
    config.num_blocks = args.n;
    config.tuple_budget = args.tuple_budget;
    config.subsampling = subsampling_from_string(args.subsampling);
    config.threshold = args.threshold > 0.0 ? args.threshold
                                            : threshold_for_arl(args.arl, args.b0);
    const KernelFamily family = kernel_family_from_string(args.kernel);
    if (family == KernelFamily::polynomial) {
        config.kernel = KernelSpec::polynomial(1.0, 2);
    } else {
        const double sigma = args.sigma > 0.0
                                 ? args.sigma
                                 : median_bandwidth(pool.samples) * args.sigma_multiplier;
        config.kernel = family == KernelFamily::gaussian_rbf ? KernelSpec::gaussian(sigma)
                                                             : KernelSpec::laplacian(sigma);
    }

    std::cout.precision(10);
    std::cout << "seed=" << args.seed << "\n";
    std::cout << "threshold=" << config.threshold << "\n";
    Detector detector(config, std::move(pool));
    for (const Sample& s : stream) {
        const Decision d = detector.step(s);
        if (d.kind == DecisionKind::alarm) {
            std::cout << "alarm at t=" << d.t << "\n";
            std::cout << "statistic=" << *d.statistic << "\n";
            return kExitOk;
        }
    }
    std::cout << "no alarm\n";
    if (const auto last = detector.last_statistic()) {
        std::cout << "statistic=" << *last << "\n";
    } else {
        std::cout << "statistic=undefined\n";
    }
    return kExitOk;
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_dir;       // override
    int replications = -1;     // override
    long seed = -1;            // override
    int verbosity = -1;        // override
};

ExperimentPlan plan_from_json(const json& cfg, bool& sweep, std::string& out_dir,
                              int& verbosity) {
    static const std::vector<std::string> known = {
        "methods", "cases", "target_arl", "b0_grid", "n_grid", "kernel_grid",
        "sigma_multiplier_grid", "replications", "edd_cap", "base_seed",
        "reference_pool_size", "subsampling", "tuple_budget", "calibration_reps",
        "sweep", "out_dir", "verbosity"};
    for (const auto& [key, value] : cfg.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key: " + key);
        }
    }
    ExperimentPlan plan;
    if (cfg.contains("methods")) {
        plan.methods.clear();
        for (const auto& m : cfg.at("methods")) {
            plan.methods.push_back(method_from_string(m.get<std::string>()));
        }
    }
    if (cfg.contains("cases")) {
        plan.cases.clear();
        for (const auto& c : cfg.at("cases")) {
            plan.cases.push_back(case_from_string(c.get<std::string>()));
        }
    }
    if (cfg.contains("target_arl")) plan.target_arl = cfg.at("target_arl").get<double>();
    if (cfg.contains("b0_grid")) plan.b0_grid = cfg.at("b0_grid").get<std::vector<int>>();
    if (cfg.contains("n_grid")) plan.n_grid = cfg.at("n_grid").get<std::vector<int>>();
    if (cfg.contains("kernel_grid")) {
        plan.kernel_grid.clear();
        for (const auto& k : cfg.at("kernel_grid")) {
            plan.kernel_grid.push_back(kernel_family_from_string(k.get<std::string>()));
        }
    }
    if (cfg.contains("sigma_multiplier_grid")) {
        plan.sigma_multiplier_grid = cfg.at("sigma_multiplier_grid").get<std::vector<double>>();
    }
    if (cfg.contains("replications")) plan.replications = cfg.at("replications").get<int>();
    if (cfg.contains("edd_cap")) plan.edd_cap = cfg.at("edd_cap").get<int>();
    if (cfg.contains("base_seed")) plan.base_seed = cfg.at("base_seed").get<std::uint64_t>();
    if (cfg.contains("reference_pool_size")) {
        plan.reference_pool_size = cfg.at("reference_pool_size").get<int>();
    }
    if (cfg.contains("subsampling")) {
        plan.subsampling = subsampling_from_string(cfg.at("subsampling").get<std::string>());
    }
    if (cfg.contains("tuple_budget")) plan.tuple_budget = cfg.at("tuple_budget").get<int>();
    if (cfg.contains("calibration_reps")) {
        plan.calibration_reps = cfg.at("calibration_reps").get<int>();
    }
    sweep = cfg.value("sweep", false);
    out_dir = cfg.value("out_dir", std::string("results"));
    verbosity = cfg.value("verbosity", 1);
    return plan;
}

int cmd_experiment(const ExperimentArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw InputError("cannot open config file: " + args.config_path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    bool sweep = false;
    std::string out_dir;
    int verbosity = 1;
    ExperimentPlan plan = plan_from_json(cfg, sweep, out_dir, verbosity);
    if (args.replications > 0) plan.replications = args.replications;
    if (args.seed >= 0) plan.base_seed = static_cast<std::uint64_t>(args.seed);
    if (!args.out_dir.empty()) out_dir = args.out_dir;
    if (args.verbosity >= 0) verbosity = args.verbosity;

    std::cout << "base_seed=" << plan.base_seed << "\n";
    const std::vector<EddResult> results = sweep ? run_sweep(plan) : run_edd(plan);
    emit_results(results, out_dir);
    if (verbosity > 0) {
        std::cout.precision(6);
        for (const EddResult& r : results) {
            std::cout << to_string(r.cell.method) << " " << to_string(r.cell.case_id)
                      << " B0=" << r.cell.b0;
            if (r.cell.uses_kernel) {
                std::cout << " N=" << r.cell.n << " kernel=" << to_string(r.cell.kernel)
                          << " sigma_mult=" << r.cell.sigma_multiplier;
            }
            std::cout << " threshold=" << r.threshold
                      << " mean_edd=" << r.summary.mean_delay
                      << " censored=" << r.summary.censoring_fraction << "\n";
        }
    }
    std::cout << "wrote " << out_dir << "/replications.csv and " << out_dir
              << "/summary.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online kernel change-point detection: scan B-statistic, parametric "
                 "baselines, ARL calibration, and an EDD experiment harness"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand(
        "calibrate", "Convert a target ARL into a detection threshold");
    calibrate->add_option("--arl", cal.arl, "Target average run length (> 1)")->required();
    calibrate->add_option("--b0", cal.b0, "Block size B0 (>= 2)");

    GenerateArgs gen;
    auto* generate =
        app.add_subcommand("generate", "Write a synthetic stream for one of the five cases");
    generate->add_option("--case", gen.case_name, "Case id (case1-mean-shift .. case5-laplace, null-only)");
    generate->add_option("--tau", gen.tau, "Pre-change sample count")->required();
    generate->add_option("--length", gen.length, "Total sample count")->required();
    generate->add_option("--seed", gen.seed, "Stream seed");
    generate->add_option("--dim", gen.dimension, "Dimension (null-only case only)");
    generate->add_flag("--header", gen.header, "Write a header row");
    generate->add_option("--out", gen.out_path, "Output CSV path")->required();

    DetectArgs det;
    auto* detect = app.add_subcommand("detect", "Run the detector over a stream CSV");
    detect->add_option("--stream", det.stream_path, "Stream CSV path")->required();
    detect->add_option("--pool", det.pool_path, "Reference pool CSV path")->required();
    detect->add_option("--b0", det.b0, "Block size B0");
    detect->add_option("--n", det.n, "Number of reference blocks N");
    detect->add_option("--kernel", det.kernel, "Kernel family");
    detect->add_option("--sigma", det.sigma, "Kernel bandwidth (default: median heuristic)");
    detect->add_option("--sigma-multiplier", det.sigma_multiplier,
                       "Multiplier on the median bandwidth");
    detect->add_option("--threshold", det.threshold,
                       "Alarm threshold b (default: from --arl)");
    detect->add_option("--arl", det.arl, "Target ARL used to derive the threshold");
    detect->add_option("--seed", det.seed, "Seed for block draw and variance tuples");
    detect->add_option("--tuple-budget", det.tuple_budget, "6-tuples for variance estimation");
    detect->add_option("--subsampling", det.subsampling, "random or structured");

    ExperimentArgs exp;
    auto* experiment =
        app.add_subcommand("experiment", "Run the Monte Carlo EDD/sweep harness from a config");
    experiment->add_option("--config", exp.config_path, "JSON config path")->required();
    experiment->add_option("--out", exp.out_dir, "Output directory (overrides config)");
    experiment->add_option("--replications", exp.replications, "Override replication count");
    experiment->add_option("--seed", exp.seed, "Override base seed");
    experiment->add_option("--verbosity", exp.verbosity, "0 = quiet, 1 = per-cell summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (calibrate->parsed()) {
            if (!(cal.arl > 1.0)) {
                std::cerr << "error: --arl must be > 1\n";
                return kExitUsage;
            }
            return cmd_calibrate(cal);
        }
        if (generate->parsed()) return cmd_generate(gen);
        if (detect->parsed()) return cmd_detect(det);
        if (experiment->parsed()) return cmd_experiment(exp);
    } catch (const scanb::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const scanb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
