#include "scanb/harness.hpp"

#include "scanb/csv.hpp"
#include "scanb/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace scanb {

namespace {

constexpr std::uint64_t kRolePool = 11;
constexpr std::uint64_t kRoleStream = 12;
constexpr std::uint64_t kRoleCalibPool = 13;
constexpr std::uint64_t kRoleCalibStream = 14;

std::uint64_t cell_hash(const CellKey& cell) {
    return mix_seed({static_cast<std::uint64_t>(cell.method),
                     static_cast<std::uint64_t>(cell.case_id),
                     static_cast<std::uint64_t>(cell.b0),
                     static_cast<std::uint64_t>(cell.n),
                     static_cast<std::uint64_t>(cell.kernel),
                     std::bit_cast<std::uint64_t>(cell.sigma_multiplier)});
}

int stream_dimension(CaseId id) {
    const int d = case_dimension(id);
    return d == 0 ? 10 : d;
}

KernelSpec make_kernel(KernelFamily family, double median, double multiplier) {
    switch (family) {
        case KernelFamily::gaussian_rbf: return KernelSpec::gaussian(median * multiplier);
        case KernelFamily::laplacian_rbf: return KernelSpec::laplacian(median * multiplier);
        case KernelFamily::polynomial: return KernelSpec::polynomial(1.0, 2);
    }
    throw InputError("make_kernel: invalid family");
}

std::unique_ptr<StreamingStatistic> build_statistic(const ExperimentPlan& plan,
                                                    const CellKey& cell, double threshold,
                                                    std::uint64_t pool_seed) {
    const int d = stream_dimension(cell.case_id);
    switch (cell.method) {
        case Method::scan_b: {
            ReferencePool pool =
                generate_reference_pool(cell.case_id, plan.reference_pool_size, pool_seed);
            const double median = cell.uses_kernel && cell.kernel != KernelFamily::polynomial
                                      ? median_bandwidth(pool.samples)
                                      : 1.0;
            DetectorConfig config;
            config.block_size = cell.b0;
            config.num_blocks = cell.n;
            config.kernel = make_kernel(cell.kernel, median, cell.sigma_multiplier);
            config.threshold = threshold;
            config.subsampling = plan.subsampling;
            config.tuple_budget = plan.tuple_budget;
            return std::make_unique<ScanBStatistic>(config, std::move(pool));
        }
        case Method::hotelling: {
            ReferencePool pool =
                generate_reference_pool(cell.case_id, plan.reference_pool_size, pool_seed);
            return std::make_unique<HotellingStatistic>(fit_reference(pool.samples), cell.b0);
        }
        case Method::glr:
            return std::make_unique<GlrStatistic>(d, cell.b0);
    }
    throw InputError("build_statistic: invalid method");
}

// Pre-change samples needed before the statistic is defined at the first
// post-change step.
long warmup_length(Method method, CaseId case_id, int b0) {
    if (method == Method::glr) return b0 + stream_dimension(case_id) + 1;
    return b0;
}

double calibrate_cell(const ExperimentPlan& plan, const CellKey& cell,
                      std::map<std::string, double>& cache) {
    std::ostringstream key;
    key << to_string(cell.method) << '|' << to_string(cell.case_id) << '|' << cell.b0;
    if (auto it = cache.find(key.str()); it != cache.end()) return it->second;

    double threshold;
    if (cell.method == Method::scan_b) {
        threshold = threshold_for_arl(plan.target_arl, cell.b0);
    } else {
        const int d = stream_dimension(cell.case_id);
        StatisticFactory stat_factory = [&plan, cell](std::uint64_t rep) {
            return build_statistic(plan, cell, 0.0,
                                   mix_seed({plan.base_seed, kRoleCalibPool,
                                             cell_hash(cell), rep}));
        };
        StreamFactory stream_factory = [&plan, cell, d](std::uint64_t rep) {
            return null_sample_source(cell.case_id, d,
                                      mix_seed({plan.base_seed, kRoleCalibStream,
                                                cell_hash(cell), rep}));
        };
        threshold = calibrate_threshold_by_simulation(stat_factory, plan.target_arl,
                                                      stream_factory, plan.calibration_reps);
    }
    cache.emplace(key.str(), threshold);
    return threshold;
}

EddResult run_cell(const ExperimentPlan& plan, const CellKey& cell, double threshold) {
    EddResult result;
    result.cell = cell;
    result.threshold = threshold;
    const auto reps = static_cast<std::size_t>(plan.replications);
    result.delays.assign(reps, plan.edd_cap);
    result.censored.assign(reps, true);
    const std::uint64_t cell_id = cell_hash(cell);
    const int d = stream_dimension(cell.case_id);
    const long warmup = warmup_length(cell.method, cell.case_id, cell.b0);

    parallel_for(plan.replications, [&](long rep) {
        const std::uint64_t urep = static_cast<std::uint64_t>(rep);
        auto statistic = build_statistic(
            plan, cell, threshold, mix_seed({plan.base_seed, kRolePool, cell_id, urep}));
        StreamSpec spec;
        spec.case_id = cell.case_id;
        spec.dimension = d;
        spec.tau = warmup;  // change occurs at the first post-change sample
        spec.length = warmup + plan.edd_cap;
        spec.seed = mix_seed({plan.base_seed, kRoleStream, cell_id, urep});
        StreamGen gen(spec);
        for (long i = 0; i < warmup; ++i) statistic->step(gen.next());
        for (int j = 1; j <= plan.edd_cap; ++j) {
            const auto value = statistic->step(gen.next());
            if (value && *value > threshold) {
                result.delays[static_cast<std::size_t>(rep)] = j;
                result.censored[static_cast<std::size_t>(rep)] = false;
                break;
            }
        }
    });
    result.summary = summarize(result.delays, result.censored);
    return result;
}

std::vector<CellKey> build_cells(const ExperimentPlan& plan) {
    std::vector<CellKey> cells;
    for (Method method : plan.methods) {
        for (CaseId case_id : plan.cases) {
            for (int b0 : plan.b0_grid) {
                if (method != Method::scan_b) {
                    CellKey cell;
                    cell.method = method;
                    cell.case_id = case_id;
                    cell.b0 = b0;
                    cells.push_back(cell);
                    continue;
                }
                for (int n : plan.n_grid) {
                    for (KernelFamily kernel : plan.kernel_grid) {
                        for (double mult : plan.sigma_multiplier_grid) {
                            CellKey cell;
                            cell.method = method;
                            cell.case_id = case_id;
                            cell.b0 = b0;
                            cell.n = n;
                            cell.kernel = kernel;
                            cell.sigma_multiplier = mult;
                            cell.uses_kernel = true;
                            cells.push_back(cell);
                        }
                    }
                }
            }
        }
    }
    return cells;
}

std::string format_double(double v) {
    std::ostringstream buf;
    buf.precision(10);
    buf << v;
    return buf.str();
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::scan_b: return "scanB";
        case Method::hotelling: return "hotelling";
        case Method::glr: return "glr";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "scanB" || name == "scanb" || name == "scan-b") return Method::scan_b;
    if (name == "hotelling") return Method::hotelling;
    if (name == "glr") return Method::glr;
    throw InputError("unknown method: " + name);
}

void ExperimentPlan::validate() const {
    if (methods.empty()) throw ConfigError("ExperimentPlan: methods must be non-empty");
    if (cases.empty()) throw ConfigError("ExperimentPlan: cases must be non-empty");
    if (!(target_arl > 1.0)) throw ConfigError("ExperimentPlan: target_arl must be > 1");
    if (replications < 1) throw ConfigError("ExperimentPlan: replications must be >= 1");
    if (edd_cap < 1) throw ConfigError("ExperimentPlan: edd_cap must be >= 1");
    if (b0_grid.empty() || n_grid.empty() || kernel_grid.empty() ||
        sigma_multiplier_grid.empty()) {
        throw ConfigError("ExperimentPlan: grids must be non-empty");
    }
    for (int b0 : b0_grid) {
        if (b0 < 2) throw ConfigError("ExperimentPlan: B0 must be >= 2");
        for (int n : n_grid) {
            if (n < 1) throw ConfigError("ExperimentPlan: N must be >= 1");
            if (static_cast<long>(n) * b0 > reference_pool_size) {
                throw ConfigError("ExperimentPlan: reference pool of " +
                                  std::to_string(reference_pool_size) +
                                  " cannot supply N*B0 = " + std::to_string(n * b0));
            }
        }
    }
    for (double m : sigma_multiplier_grid) {
        if (!(m > 0.0)) throw ConfigError("ExperimentPlan: sigma multipliers must be positive");
    }
    if (tuple_budget < 1) throw ConfigError("ExperimentPlan: tuple_budget must be >= 1");
    if (calibration_reps < 1) throw ConfigError("ExperimentPlan: calibration_reps must be >= 1");
}

EddSummary summarize(const std::vector<int>& delays, const std::vector<bool>& censored) {
    if (delays.size() != censored.size()) throw InputError("summarize: size mismatch");
    EddSummary s;
    std::vector<int> kept;
    std::size_t n_censored = 0;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (censored[i]) {
            ++n_censored;
        } else {
            kept.push_back(delays[i]);
        }
    }
    s.censoring_fraction =
        delays.empty() ? 0.0 : static_cast<double>(n_censored) / delays.size();
    if (kept.empty()) return s;
    std::sort(kept.begin(), kept.end());
    const std::size_t m = kept.size();
    s.median_delay = m % 2 == 1 ? kept[m / 2] : 0.5 * (kept[m / 2 - 1] + kept[m / 2]);
    double sum = 0.0;
    for (int v : kept) sum += v;
    s.mean_delay = sum / static_cast<double>(m);
    double sq = 0.0;
    for (int v : kept) {
        const double c = v - s.mean_delay;
        sq += c * c;
    }
    s.sd_delay = m > 1 ? std::sqrt(sq / static_cast<double>(m - 1)) : 0.0;
    return s;
}

std::vector<EddResult> run_edd(const ExperimentPlan& plan) {
    plan.validate();
    const auto cells = build_cells(plan);
    std::map<std::string, double> threshold_cache;
    std::vector<EddResult> results;
    results.reserve(cells.size());
    for (const CellKey& cell : cells) {
        double threshold;
        try {
            threshold = calibrate_cell(plan, cell, threshold_cache);
        } catch (const std::exception& e) {
            throw NumericError("calibration failed for cell " + to_string(cell.method) + "/" +
                               to_string(cell.case_id) + "/B0=" + std::to_string(cell.b0) +
                               ": " + e.what());
        }
        results.push_back(run_cell(plan, cell, threshold));
    }
    return results;
}

std::vector<EddResult> run_sweep(const ExperimentPlan& plan) {
    plan.validate();
    int wide_axes = 0;
    wide_axes += plan.b0_grid.size() > 1;
    wide_axes += plan.n_grid.size() > 1;
    wide_axes += plan.kernel_grid.size() > 1;
    wide_axes += plan.sigma_multiplier_grid.size() > 1;
    if (wide_axes > 1) {
        throw InputError("run_sweep: at most one of the B0/N/kernel/sigma grids may have "
                         "more than one entry (got " + std::to_string(wide_axes) + ")");
    }
    return run_edd(plan);
}

void emit_results(const std::vector<EddResult>& results, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    auto cell_fields = [](const CellKey& cell) {
        std::ostringstream row;
        row << csv_field(to_string(cell.method)) << ',' << csv_field(to_string(cell.case_id))
            << ',' << cell.b0 << ',';
        if (cell.uses_kernel) {
            row << cell.n << ',' << csv_field(to_string(cell.kernel)) << ','
                << format_double(cell.sigma_multiplier);
        } else {
            row << ",,";
        }
        return row.str();
    };

    const fs::path rep_path = fs::path(out_dir) / "replications.csv";
    {
        std::ofstream out(rep_path);
        if (!out) throw InputError("cannot open for writing: " + rep_path.string());
        out << "method,case,B0,N,kernel,sigma_multiplier,replication,delay,censored\n";
        for (const EddResult& r : results) {
            for (std::size_t i = 0; i < r.delays.size(); ++i) {
                out << cell_fields(r.cell) << ',' << i << ',' << r.delays[i] << ','
                    << (r.censored[i] ? "true" : "false") << "\n";
            }
        }
        if (!out) throw InputError("write failed: " + rep_path.string());
    }

    const fs::path sum_path = fs::path(out_dir) / "summary.csv";
    {
        std::ofstream out(sum_path);
        if (!out) throw InputError("cannot open for writing: " + sum_path.string());
        out << "method,case,B0,N,kernel,sigma_multiplier,threshold,replications,"
               "median_delay,mean_delay,sd_delay,censoring_fraction\n";
        for (const EddResult& r : results) {
            out << cell_fields(r.cell) << ',' << format_double(r.threshold) << ','
                << r.delays.size() << ',';
            if (r.summary.censoring_fraction < 1.0 && !r.delays.empty()) {
                out << format_double(r.summary.median_delay) << ','
                    << format_double(r.summary.mean_delay) << ','
                    << format_double(r.summary.sd_delay);
            } else {
                out << ",,";
            }
            out << ',' << format_double(r.summary.censoring_fraction) << "\n";
        }
        if (!out) throw InputError("write failed: " + sum_path.string());
    }
}

}  // namespace scanb
