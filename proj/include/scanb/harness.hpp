#pragma once

#include "scanb/calibration.hpp"
#include "scanb/detector.hpp"

namespace scanb {

enum class Method { scan_b, hotelling, glr };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct ExperimentPlan {
    std::vector<Method> methods{Method::scan_b};
    std::vector<CaseId> cases{CaseId::case1_mean_shift};
    double target_arl = 500.0;
    std::vector<int> b0_grid{20};
    std::vector<int> n_grid{5};
    std::vector<KernelFamily> kernel_grid{KernelFamily::gaussian_rbf};
    std::vector<double> sigma_multiplier_grid{1.0};
    int replications = 100;
    int edd_cap = 50;
    std::uint64_t base_seed = 1;
    int reference_pool_size = 500;
    Subsampling subsampling = Subsampling::random_scheme;
    int tuple_budget = 2000;
    int calibration_reps = 100;  // null runs per simulate_arl call when calibrating baselines

    void validate() const;
};

struct CellKey {
    Method method = Method::scan_b;
    CaseId case_id = CaseId::case1_mean_shift;
    int b0 = 20;
    int n = 0;                      // 0 for parametric baselines
    KernelFamily kernel = KernelFamily::gaussian_rbf;
    double sigma_multiplier = 0.0;  // 0 for parametric baselines
    bool uses_kernel = false;
};

struct EddSummary {
    double median_delay = 0.0;  // over uncensored replications
    double mean_delay = 0.0;
    double sd_delay = 0.0;
    double censoring_fraction = 0.0;
};

struct EddResult {
    CellKey cell;
    double threshold = 0.0;
    std::vector<int> delays;         // post-change samples to alarm, edd_cap if censored
    std::vector<bool> censored;
    EddSummary summary;
};

/// Calibrate each cell's threshold (analytic ARL inversion for scanB,
/// simulation for the parametric baselines), then run `replications`
/// change-at-zero streams per cell with a warm-started window and record
/// the detection delay, censored at edd_cap.
std::vector<EddResult> run_edd(const ExperimentPlan& plan);

/// One-dimensional sweep: exactly one of the B0/N/kernel/sigma grids may
/// have more than one entry.
std::vector<EddResult> run_sweep(const ExperimentPlan& plan);

/// Write `<prefix>replications.csv` (tidy per-replication rows) and
/// `<prefix>summary.csv` (one row per cell), UTF-8, RFC-4180 quoting.
void emit_results(const std::vector<EddResult>& results, const std::string& out_dir);

EddSummary summarize(const std::vector<int>& delays, const std::vector<bool>& censored);

}  // namespace scanb
