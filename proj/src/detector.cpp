#include "scanb/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace scanb {

std::string to_string(Subsampling s) {
    return s == Subsampling::random_scheme ? "random" : "structured";
}

Subsampling subsampling_from_string(const std::string& name) {
    if (name == "random") return Subsampling::random_scheme;
    if (name == "structured") return Subsampling::structured;
    throw InputError("unknown subsampling scheme: " + name);
}

void DetectorConfig::validate() const {
    if (block_size < 2) throw ConfigError("DetectorConfig: block_size must be >= 2");
    if (num_blocks < 1) throw ConfigError("DetectorConfig: num_blocks must be >= 1");
    if (!(threshold > 0.0)) throw ConfigError("DetectorConfig: threshold must be positive");
    if (tuple_budget < 1) throw ConfigError("DetectorConfig: tuple_budget must be >= 1");
    kernel.validate();
}

std::vector<Block> draw_reference_blocks(const ReferencePool& pool, int num_blocks,
                                         int block_size, std::mt19937_64& rng) {
    const std::size_t need = static_cast<std::size_t>(num_blocks) * block_size;
    if (pool.size() < need) {
        throw ConfigError("draw_reference_blocks: pool of " + std::to_string(pool.size()) +
                          " samples cannot supply " + std::to_string(need) +
                          " without replacement");
    }
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: only the first N*B0 positions are needed.
    for (std::size_t i = 0; i < need; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<Block> blocks(static_cast<std::size_t>(num_blocks));
    std::size_t k = 0;
    for (auto& block : blocks) {
        block.origin = BlockOrigin::reference;
        block.samples.reserve(static_cast<std::size_t>(block_size));
        for (int j = 0; j < block_size; ++j) {
            block.samples.push_back(pool.samples[idx[k++]]);
        }
    }
    return blocks;
}

std::vector<std::array<std::size_t, 6>> draw_variance_tuples(std::size_t n, int m,
                                                             Subsampling scheme,
                                                             std::mt19937_64& rng) {
    std::vector<std::array<std::size_t, 6>> tuples(static_cast<std::size_t>(m));
    if (scheme == Subsampling::random_scheme) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (auto& t : tuples) {
            for (std::size_t i = 0; i < 6; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                std::swap(idx[i], idx[pick(rng)]);
                t[i] = idx[i];
            }
        }
    } else {
        // Balanced coverage: each tuple takes the 6 least-used indices,
        // ties broken at random, so appearance counts never differ by
        // more than one and every index lands in >= floor(6m/n) tuples.
        std::vector<long> count(n, 0);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (auto& t : tuples) {
            std::shuffle(order.begin(), order.end(), rng);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return count[a] < count[b]; });
            for (std::size_t i = 0; i < 6; ++i) {
                t[i] = order[i];
                ++count[order[i]];
            }
        }
    }
    return tuples;
}

VarianceEstimate estimate_variance_null(const ReferencePool& pool, const KernelSpec& kernel,
                                        int block_size, int num_blocks, Subsampling scheme,
                                        int tuple_budget, std::mt19937_64& rng) {
    if (pool.size() < 6) {
        throw ConfigError("estimate_variance_null: pool must hold at least 6 samples");
    }
    if (block_size < 2) throw ConfigError("estimate_variance_null: block_size must be >= 2");
    if (num_blocks < 1) throw ConfigError("estimate_variance_null: num_blocks must be >= 1");
    if (tuple_budget < 1) throw ConfigError("estimate_variance_null: tuple budget must be >= 1");

    const KernelSpec& spec = kernel;
    const auto tuples = draw_variance_tuples(pool.size(), tuple_budget, scheme, rng);

    double sum_h1 = 0.0, sum_h2 = 0.0, sum_h1h2 = 0.0, sum_h1sq = 0.0;
    for (const auto& t : tuples) {
        const Sample& x0 = pool.samples[t[0]];
        const Sample& x1 = pool.samples[t[1]];
        const Sample& x2 = pool.samples[t[2]];
        const Sample& x3 = pool.samples[t[3]];
        const Sample& y0 = pool.samples[t[4]];
        const Sample& y1 = pool.samples[t[5]];
        const double h1 = h_statistic(spec, x0, x1, y0, y1);
        const double h2 = h_statistic(spec, x2, x3, y0, y1);
        sum_h1 += h1;
        sum_h2 += h2;
        sum_h1h2 += h1 * h2;
        sum_h1sq += h1 * h1;
    }

    const double m = static_cast<double>(tuple_budget);
    VarianceEstimate est;
    est.tuples_used = tuple_budget;
    est.e_h2 = sum_h1sq / m;
    if (tuple_budget > 1) {
        // unbiased (m-1)-denominator sample covariance
        est.cov_hh = (sum_h1h2 - sum_h1 * sum_h2 / m) / (m - 1.0);
    }
    const double pairs = 0.5 * block_size * (block_size - 1);  // C(B0, 2)
    const double n_blocks = static_cast<double>(num_blocks);
    est.combined = (est.e_h2 / n_blocks + (n_blocks - 1.0) * est.cov_hh / n_blocks) / pairs;
    if (!(est.combined > 0.0)) {
        throw NumericError("estimate_variance_null: combined variance estimate is " +
                           std::to_string(est.combined) + " (not positive)");
    }
    return est;
}

Detector::Detector(DetectorConfig config, ReferencePool pool)
    : config_(config), pool_(std::move(pool)), rng_(make_rng({pool_.rng_seed, 0xde7ec7ULL})) {
    config_.validate();
    const std::size_t need =
        static_cast<std::size_t>(config_.num_blocks) * config_.block_size;
    if (pool_.size() < need) {
        throw ConfigError("Detector: reference pool too small for N*B0 samples");
    }
    if (pool_.size() < 6) {
        throw ConfigError("Detector: variance estimation needs at least 6 pool samples");
    }
    reference_blocks_ =
        draw_reference_blocks(pool_, config_.num_blocks, config_.block_size, rng_);
    var_zb_ = estimate_variance_null(pool_, config_.kernel, config_.block_size,
                                     config_.num_blocks, config_.subsampling,
                                     config_.tuple_budget, rng_);
}

void Detector::rebuild_caches() {
    const int b0 = config_.block_size;
    const int n = config_.num_blocks;
    ref_internal_sum_.assign(static_cast<std::size_t>(n), 0.0);
    cross_.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(b0, b0));
    window_gram_.resize(b0, b0);
    for (int i = 0; i < n; ++i) {
        const auto& x = reference_blocks_[static_cast<std::size_t>(i)].samples;
        double s = 0.0;
        for (int p = 0; p < b0; ++p) {
            for (int q = p + 1; q < b0; ++q) {
                s += 2.0 * eval_kernel(config_.kernel, x[static_cast<std::size_t>(p)],
                                       x[static_cast<std::size_t>(q)]);
            }
            for (int c = 0; c < b0; ++c) {
                cross_[static_cast<std::size_t>(i)](p, c) = eval_kernel(
                    config_.kernel, x[static_cast<std::size_t>(p)],
                    window_[static_cast<std::size_t>(c)]);
            }
        }
        ref_internal_sum_[static_cast<std::size_t>(i)] = s;
    }
    for (int p = 0; p < b0; ++p) {
        for (int q = p; q < b0; ++q) {
            const double k = eval_kernel(config_.kernel, window_[static_cast<std::size_t>(p)],
                                         window_[static_cast<std::size_t>(q)]);
            window_gram_(p, q) = k;
            window_gram_(q, p) = k;
        }
    }
    caches_ready_ = true;
}

// Only the kernel rows of the incoming sample are recomputed; the evicted
// sample's rows and columns are shifted out.
void Detector::slide_caches(const Sample& incoming) {
    const int b0 = config_.block_size;
    for (auto& c : cross_) {
        c.leftCols(b0 - 1) = c.rightCols(b0 - 1).eval();
    }
    window_gram_.topLeftCorner(b0 - 1, b0 - 1) =
        window_gram_.bottomRightCorner(b0 - 1, b0 - 1).eval();
    for (int i = 0; i < config_.num_blocks; ++i) {
        const auto& x = reference_blocks_[static_cast<std::size_t>(i)].samples;
        for (int p = 0; p < b0; ++p) {
            cross_[static_cast<std::size_t>(i)](p, b0 - 1) =
                eval_kernel(config_.kernel, x[static_cast<std::size_t>(p)], incoming);
        }
    }
    for (int p = 0; p < b0 - 1; ++p) {
        const double k =
            eval_kernel(config_.kernel, window_[static_cast<std::size_t>(p)], incoming);
        window_gram_(p, b0 - 1) = k;
        window_gram_(b0 - 1, p) = k;
    }
    window_gram_(b0 - 1, b0 - 1) = eval_kernel(config_.kernel, incoming, incoming);
}

double Detector::compute_z() const {
    const int b0 = config_.block_size;
    const double denom = static_cast<double>(b0) * (b0 - 1);
    const double s_yy = window_gram_.sum() - window_gram_.trace();
    double z = 0.0;
    for (int i = 0; i < config_.num_blocks; ++i) {
        const auto& c = cross_[static_cast<std::size_t>(i)];
        const double cross_pairs = c.sum() - c.trace();  // ordered pairs p != q
        z += (ref_internal_sum_[static_cast<std::size_t>(i)] + s_yy - 2.0 * cross_pairs) /
             denom;
    }
    return z / config_.num_blocks;
}

std::optional<double> Detector::scan_statistic() const {
    if (static_cast<int>(window_.size()) < config_.block_size || !caches_ready_) {
        return std::nullopt;
    }
    return compute_z();
}

Decision Detector::step(const Sample& sample) {
    if (sample.size() != pool_.dimension()) {
        throw InputError("Detector::step: sample dimension " + std::to_string(sample.size()) +
                         " does not match pool dimension " +
                         std::to_string(pool_.dimension()));
    }
    ++t_;
    const int b0 = config_.block_size;
    const bool was_full = static_cast<int>(window_.size()) == b0;
    if (was_full) window_.pop_front();

    if (config_.reblock_policy == ReblockPolicy::redraw_each_step) {
        reference_blocks_ =
            draw_reference_blocks(pool_, config_.num_blocks, config_.block_size, rng_);
        caches_ready_ = false;
    }

    if (static_cast<int>(window_.size()) + 1 < b0) {
        window_.push_back(sample);
        return {DecisionKind::not_ready, t_, std::nullopt};
    }

    if (was_full && caches_ready_) {
        slide_caches(sample);
        window_.push_back(sample);
    } else {
        window_.push_back(sample);
        rebuild_caches();
    }

    const double z = compute_z();
    const double z_norm = z / std::sqrt(var_zb_.combined);
    last_statistic_ = z_norm;
    if (z_norm > config_.threshold) {
        return {DecisionKind::alarm, t_, z_norm};
    }
    return {DecisionKind::keep_going, t_, z_norm};
}

}  // namespace scanb
