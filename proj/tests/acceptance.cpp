// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fail.

#include "scanb/detector.hpp"
#include "scanb/harness.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace scanb;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail
              << std::endl;
    if (!pass) ++failures;
}

const EddResult& find_cell(const std::vector<EddResult>& results, Method m, CaseId c) {
    for (const auto& r : results) {
        if (r.cell.method == m && r.cell.case_id == c) return r;
    }
    throw std::logic_error("cell not found");
}

double mean_delay_all(const EddResult& r) {
    double sum = 0;
    for (int d : r.delays) sum += d;
    return sum / static_cast<double>(r.delays.size());
}

// At most one adjacent inversion, and its size bounded by `slack`.
bool nearly_monotone(const std::vector<double>& values, bool increasing, double slack) {
    int inversions = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double step = increasing ? values[i] - values[i - 1] : values[i - 1] - values[i];
        if (step < 0.0) {
            ++inversions;
            if (-step > slack) return false;
        }
    }
    return inversions <= 1;
}

// Population null-variance moments over every ordered 6-tuple of distinct
// pool indices.
VarianceEstimate exhaustive_variance(const ReferencePool& pool, const KernelSpec& kernel,
                                     int b0, int n_blocks) {
    const std::size_t n = pool.size();
    double sum_h1 = 0, sum_h2 = 0, sum_h1h2 = 0, sum_h1sq = 0;
    long count = 0;
    std::array<std::size_t, 6> t{};
    auto visit = [&](auto&& self, std::size_t depth) -> void {
        if (depth == 6) {
            const double h1 = h_statistic(kernel, pool.samples[t[0]], pool.samples[t[1]],
                                          pool.samples[t[4]], pool.samples[t[5]]);
            const double h2 = h_statistic(kernel, pool.samples[t[2]], pool.samples[t[3]],
                                          pool.samples[t[4]], pool.samples[t[5]]);
            sum_h1 += h1;
            sum_h2 += h2;
            sum_h1h2 += h1 * h2;
            sum_h1sq += h1 * h1;
            ++count;
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            bool used = false;
            for (std::size_t k = 0; k < depth; ++k) used |= t[k] == i;
            if (used) continue;
            t[depth] = i;
            self(self, depth + 1);
        }
    };
    visit(visit, 0);
    const double m = static_cast<double>(count);
    VarianceEstimate est;
    est.tuples_used = static_cast<int>(count);
    est.e_h2 = sum_h1sq / m;
    est.cov_hh = sum_h1h2 / m - (sum_h1 / m) * (sum_h2 / m);
    const double pairs = 0.5 * b0 * (b0 - 1);
    est.combined = (est.e_h2 / n_blocks + (n_blocks - 1.0) * est.cov_hh / n_blocks) / pairs;
    return est;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- criteria -------------------------------------------------------------

void criterion1_analytic_arl() {
    const int b0 = 20, n_blocks = 5;
    const double target = 500.0;
    const double b = threshold_for_arl(target, b0);
    StatisticFactory factory = [&](std::uint64_t rep) {
        auto pool = generate_reference_pool(CaseId::case1_mean_shift, 500, mix_seed({101, rep}));
        DetectorConfig config;
        config.block_size = b0;
        config.num_blocks = n_blocks;
        config.kernel = KernelSpec::gaussian(median_bandwidth(pool.samples));
        config.threshold = b;
        return std::make_unique<ScanBStatistic>(config, std::move(pool));
    };
    StreamFactory nulls = [](std::uint64_t rep) {
        return null_sample_source(CaseId::case1_mean_shift, 10, mix_seed({102, rep}));
    };
    const auto result = simulate_arl(factory, b, nulls, 200, 5000);
    std::ostringstream detail;
    detail << "analytic threshold b=" << b << " gives empirical ARL "
           << result.mean_run_length << " (target 500, accept [250, 1000], "
           << result.censored << "/200 censored)";
    report(1, result.mean_run_length >= 250.0 && result.mean_run_length <= 1000.0,
           detail.str());
}

void criterion2_method_comparison(const std::vector<EddResult>& results) {
    std::ostringstream detail;
    bool pass = true;
    auto sub = [&](const std::string& label, double value, bool ok) {
        detail << label << "=" << value << (ok ? " ok; " : " FAIL; ");
        pass = pass && ok;
    };
    for (CaseId c : {CaseId::case1_mean_shift, CaseId::case2_partial_cov,
                     CaseId::case3_full_cov}) {
        const double frac = find_cell(results, Method::scan_b, c).summary.censoring_fraction;
        sub(to_string(c) + " scanB<5%", frac, frac < 0.05);
    }
    for (CaseId c : {CaseId::case4_mixture, CaseId::case5_laplace}) {
        const double scan = find_cell(results, Method::scan_b, c).summary.censoring_fraction;
        const double hot = find_cell(results, Method::hotelling, c).summary.censoring_fraction;
        const double glr = find_cell(results, Method::glr, c).summary.censoring_fraction;
        sub(to_string(c) + " scanB<10%", scan, scan < 0.10);
        sub(to_string(c) + " hotelling>50%", hot, hot > 0.50);
        sub(to_string(c) + " glr>50%", glr, glr > 0.50);
    }
    report(2, pass, detail.str());
}

void criterion3_edd_trends() {
    ExperimentPlan plan;
    plan.methods = {Method::scan_b};
    plan.cases = {CaseId::case1_mean_shift};
    plan.n_grid = {5, 10, 15};
    plan.base_seed = 3;
    const auto by_n = run_sweep(plan);

    plan = ExperimentPlan{};
    plan.methods = {Method::scan_b};
    plan.cases = {CaseId::case1_mean_shift};
    plan.b0_grid = {10, 20, 40};
    plan.base_seed = 3;
    const auto by_b0 = run_sweep(plan);

    std::vector<double> edd_n, edd_b0;
    for (const auto& r : by_n) edd_n.push_back(r.summary.mean_delay);
    for (const auto& r : by_b0) edd_b0.push_back(r.summary.mean_delay);

    std::ostringstream detail;
    detail << "mean EDD over N {5,10,15}: ";
    for (double v : edd_n) detail << v << " ";
    detail << "(non-increasing); over B0 {10,20,40}: ";
    for (double v : edd_b0) detail << v << " ";
    detail << "(non-decreasing); one inversion of <= 1 sample allowed";
    report(3, nearly_monotone(edd_n, false, 1.0) && nearly_monotone(edd_b0, true, 1.0),
           detail.str());
}

void criterion4_variance_oracle() {
    const auto pool = generate_reference_pool(CaseId::null_only, 8, 404, 1);
    const double sigma = median_bandwidth(pool.samples);
    bool pass = true;
    std::ostringstream detail;
    for (const auto& [name, kernel] :
         {std::pair<std::string, KernelSpec>{"gaussian", KernelSpec::gaussian(sigma)},
          std::pair<std::string, KernelSpec>{"laplacian", KernelSpec::laplacian(sigma)}}) {
        const auto exact = exhaustive_variance(pool, kernel, 4, 2);
        auto rng = make_rng({405});
        const auto sampled = estimate_variance_null(pool, kernel, 4, 2,
                                                    Subsampling::random_scheme, 10000, rng);
        const double rel = std::abs(sampled.combined - exact.combined) / exact.combined;
        detail << name << " rel err " << rel << "; ";
        pass = pass && rel < 0.05;
    }
    report(4, pass, detail.str() + "(m=10000 vs exhaustive, accept < 5%)");
}

void criterion5_subsampling_direction() {
    ExperimentPlan plan;
    plan.methods = {Method::scan_b};
    plan.cases = {CaseId::case1_mean_shift};
    plan.base_seed = 5;
    plan.subsampling = Subsampling::random_scheme;
    const auto random_run = run_edd(plan);
    plan.subsampling = Subsampling::structured;
    const auto structured_run = run_edd(plan);
    const double random_mean = mean_delay_all(random_run[0]);
    const double structured_mean = mean_delay_all(structured_run[0]);
    std::ostringstream detail;
    detail << "paired-seed mean EDD: structured " << structured_mean << " vs random "
           << random_mean << " (accept structured <= random + 0.5)";
    report(5, structured_mean <= random_mean + 0.5, detail.str());
}

void criterion6_unbiasedness_and_normalization() {
    // MMD^2_u averages to zero over independent same-distribution block pairs.
    const int pairs = 10000, block = 20;
    const KernelSpec kernel = KernelSpec::gaussian(
        median_bandwidth(generate_reference_pool(CaseId::case1_mean_shift, 200, 600).samples));
    auto source = null_sample_source(CaseId::case1_mean_shift, 10, 601);
    double sum = 0, sumsq = 0;
    for (int p = 0; p < pairs; ++p) {
        Block x, y;
        for (int i = 0; i < block; ++i) x.samples.push_back(source());
        for (int i = 0; i < block; ++i) y.samples.push_back(source());
        const double v = mmd2u_block(kernel, x, y);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / pairs;
    const double se = std::sqrt((sumsq / pairs - mean * mean) / pairs);
    const bool unbiased = std::abs(mean) <= 3.0 * se;

    // Z' has unit variance along a long null run.
    auto pool = generate_reference_pool(CaseId::case1_mean_shift, 500, 602);
    DetectorConfig config;
    config.kernel = KernelSpec::gaussian(median_bandwidth(pool.samples));
    config.threshold = 1e9;
    Detector detector(config, std::move(pool));
    auto stream = null_sample_source(CaseId::case1_mean_shift, 10, 603);
    double zsum = 0, zsumsq = 0;
    long zcount = 0;
    for (long t = 0; t < 10000 + config.block_size; ++t) {
        const auto d = detector.step(stream());
        if (d.statistic && zcount < 10000) {
            zsum += *d.statistic;
            zsumsq += *d.statistic * *d.statistic;
            ++zcount;
        }
    }
    const double zmean = zsum / static_cast<double>(zcount);
    const double zvar = zsumsq / static_cast<double>(zcount) - zmean * zmean;
    std::ostringstream detail;
    detail << "MMD^2_u null mean " << mean << " (|mean| <= 3 SE = " << 3.0 * se
           << "); Z' null variance " << zvar << " (accept [0.5, 1.5])";
    report(6, unbiased && zvar >= 0.5 && zvar <= 1.5, detail.str());
}

void criterion7_byte_identical_reruns() {
    ExperimentPlan plan;
    plan.methods = {Method::scan_b, Method::hotelling};
    plan.cases = {CaseId::case1_mean_shift};
    plan.target_arl = 100.0;
    plan.replications = 20;
    plan.calibration_reps = 40;
    plan.base_seed = 7;
    const std::filesystem::path dir_a = "/tmp/scanb_accept_a";
    const std::filesystem::path dir_b = "/tmp/scanb_accept_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    emit_results(run_edd(plan), dir_a.string());
    ::setenv("SCANB_THREADS", "1", 1);
    emit_results(run_edd(plan), dir_b.string());
    ::unsetenv("SCANB_THREADS");
    const bool reps_match =
        slurp(dir_a / "replications.csv") == slurp(dir_b / "replications.csv");
    const bool summary_match = slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv");
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    report(7, reps_match && summary_match,
           "rerun under a different thread count: replications.csv " +
               std::string(reps_match ? "identical" : "differs") + ", summary.csv " +
               std::string(summary_match ? "identical" : "differs"));
}

void criterion8_threshold_growth() {
    double lo = 1e300, hi = 0.0;
    std::ostringstream detail;
    for (double arl : {1e2, 1e3, 1e4, 1e5}) {
        const double b = threshold_for_arl(arl, 20);
        const double ratio = b * b / std::log(arl);
        detail << "ARL " << arl << ": b=" << b << " b^2/log(ARL)=" << ratio << "; ";
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    detail << "spread " << hi / lo << " (accept < 3)";
    report(8, hi / lo < 3.0, detail.str());
}

}  // namespace

int main() {
    try {
        criterion1_analytic_arl();

        ExperimentPlan full;
        full.methods = {Method::scan_b, Method::hotelling, Method::glr};
        full.cases = {CaseId::case1_mean_shift, CaseId::case2_partial_cov,
                      CaseId::case3_full_cov, CaseId::case4_mixture, CaseId::case5_laplace};
        full.base_seed = 2;
        criterion2_method_comparison(run_edd(full));

        criterion3_edd_trends();
        criterion4_variance_oracle();
        criterion5_subsampling_direction();
        criterion6_unbiasedness_and_normalization();
        criterion7_byte_identical_reruns();
        criterion8_threshold_growth();
    } catch (const std::exception& e) {
        std::cout << "[FAIL] acceptance suite aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
