#pragma once

#include "scanb/baselines.hpp"
#include "scanb/mmd.hpp"
#include "scanb/simgen.hpp"

#include <array>
#include <deque>
#include <optional>

namespace scanb {

enum class Subsampling { random_scheme, structured };
enum class ReblockPolicy { fixed_at_init, redraw_each_step };

std::string to_string(Subsampling s);
Subsampling subsampling_from_string(const std::string& name);

struct DetectorConfig {
    int block_size = 20;          // B0
    int num_blocks = 5;           // N
    KernelSpec kernel;
    double threshold = 3.0;       // b
    Subsampling subsampling = Subsampling::random_scheme;
    int tuple_budget = 2000;      // 6-tuples for variance estimation
    ReblockPolicy reblock_policy = ReblockPolicy::fixed_at_init;

    void validate() const;
};

/// Moment estimates of the null variance of Z_B:
/// combined = C(B0,2)^-1 * ( e_h2/N + (N-1)*cov_hh/N ).
struct VarianceEstimate {
    double e_h2 = 0.0;     // E[h^2(x,x',y,y')]
    double cov_hh = 0.0;   // Cov[h(x,x',y,y'), h(x'',x''',y,y')]
    double combined = 0.0; // Var[Z_B]
    int tuples_used = 0;
};

/// N disjoint blocks of B0 samples drawn without replacement from the pool.
std::vector<Block> draw_reference_blocks(const ReferencePool& pool, int num_blocks,
                                         int block_size, std::mt19937_64& rng);

/// The m index sets of 6 distinct pool indices used for variance
/// estimation. Under `structured`, every pool index appears in at least
/// floor(6m/n) tuples.
std::vector<std::array<std::size_t, 6>> draw_variance_tuples(std::size_t pool_size,
                                                             int tuple_budget,
                                                             Subsampling scheme,
                                                             std::mt19937_64& rng);

/// Null variance of Z_B estimated from m sampled 6-tuples of distinct pool
/// indices. Under `structured`, tuple index sets are balanced so every pool
/// index appears in at least floor(6m/n) tuples.
VarianceEstimate estimate_variance_null(const ReferencePool& pool, const KernelSpec& kernel,
                                        int block_size, int num_blocks, Subsampling scheme,
                                        int tuple_budget, std::mt19937_64& rng);

enum class DecisionKind { not_ready, keep_going, alarm };

struct Decision {
    DecisionKind kind = DecisionKind::not_ready;
    long t = 0;                          // time index after this step
    std::optional<double> statistic;     // normalized Z' when defined
};

/// Online scan B-statistic detector: N reference blocks against a sliding
/// test window of the most recent B0 samples, normalized by the estimated
/// null variance, alarm when Z' strictly exceeds the threshold.
class Detector {
public:
    Detector(DetectorConfig config, ReferencePool pool);

    /// Append one stream sample; evaluate the stopping rule once the
    /// window is full.
    Decision step(const Sample& sample);

    /// Unnormalized Z_{B0,t}: average MMD^2_u of each reference block
    /// against the current window. Empty while the window is not full.
    std::optional<double> scan_statistic() const;

    long time() const { return t_; }
    std::optional<double> last_statistic() const { return last_statistic_; }
    const VarianceEstimate& variance() const { return var_zb_; }
    const std::vector<Block>& reference_blocks() const { return reference_blocks_; }
    const DetectorConfig& config() const { return config_; }

private:
    void rebuild_caches();
    void slide_caches(const Sample& incoming);
    double compute_z() const;

    DetectorConfig config_;
    ReferencePool pool_;
    std::mt19937_64 rng_;
    std::vector<Block> reference_blocks_;
    VarianceEstimate var_zb_;
    std::deque<Sample> window_;
    long t_ = 0;
    std::optional<double> last_statistic_;

    // Cached kernel sums for the fixed-at-init policy. cross_[i](r, c) is
    // k(x_r, y_c) for reference block i against window slot c (oldest first);
    // window_gram_ is the window's own Gram matrix.
    std::vector<double> ref_internal_sum_;   // sum_{p != q} k(x_p, x_q) per block
    std::vector<Eigen::MatrixXd> cross_;
    Eigen::MatrixXd window_gram_;
    bool caches_ready_ = false;
};

/// StreamingStatistic adapter over Detector, emitting the normalized Z'.
class ScanBStatistic : public StreamingStatistic {
public:
    ScanBStatistic(DetectorConfig config, ReferencePool pool)
        : detector_(std::move(config), std::move(pool)) {}

    std::optional<double> step(const Sample& sample) override {
        const Decision d = detector_.step(sample);
        return d.statistic;
    }

    const Detector& detector() const { return detector_; }

private:
    Detector detector_;
};

}  // namespace scanb
