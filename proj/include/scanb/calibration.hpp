#pragma once

#include "scanb/baselines.hpp"

#include <functional>
#include <memory>

namespace scanb {

/// Special function v(mu) of the scan-statistic tail approximation,
/// evaluated with the standard normal CDF/PDF. Decreasing from 1 at 0+.
double nu(double mu);

/// Analytic ARL approximation for the normalized scan B-statistic at
/// threshold b and block size B0. Strictly increasing in b.
double arl_approx(double threshold, int block_size);

struct ArlQuery {
    double target_arl = 5000.0;
    int block_size = 20;
};

/// Invert arl_approx by bisection on a bracket grown from [0.1, 10];
/// relative tolerance 1e-6 on the ARL.
double threshold_for_arl(const ArlQuery& query);
double threshold_for_arl(double target_arl, int block_size);

/// Builds a fresh statistic for replication `rep`.
using StatisticFactory = std::function<std::unique_ptr<StreamingStatistic>(std::uint64_t rep)>;
/// Builds a fresh null sample source for replication `rep`.
using StreamFactory = std::function<std::function<Sample()>(std::uint64_t rep)>;

struct ArlResult {
    double mean_run_length = 0.0;
    double std_error = 0.0;
    int censored = 0;      // runs that never exceeded within the horizon
    int reps = 0;
    std::vector<long> run_lengths;  // first-exceedance times, horizon when censored
};

/// Mean first-exceedance time of `statistic > threshold` over `reps`
/// independent null streams, censored at `horizon`. Replication i uses a
/// derived seed, so results are schedule-independent.
ArlResult simulate_arl(const StatisticFactory& statistic, double threshold,
                       const StreamFactory& null_gen, int reps, long horizon);

/// Threshold whose simulated ARL matches the target within 10% relative
/// error, by bisection (common random numbers keep the search monotone).
double calibrate_threshold_by_simulation(const StatisticFactory& statistic, double target_arl,
                                         const StreamFactory& null_gen, int reps);

}  // namespace scanb
