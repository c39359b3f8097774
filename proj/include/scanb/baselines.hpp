#pragma once

#include "scanb/common.hpp"

#include <deque>
#include <optional>

namespace scanb {

/// Reference Gaussian fitted from pre-change data.
struct GaussianReference {
    Eigen::VectorXd mean;            // mu_0 hat
    Eigen::MatrixXd covariance;      // Sigma_0 hat, (n-1) denominator
    Eigen::MatrixXd covariance_inverse;
};

/// Sample mean and (n-1)-denominator covariance, inverse cached.
/// Requires more samples than dimensions; singular covariance is rejected.
GaussianReference fit_reference(const std::vector<Sample>& samples);

/// B0 * (xbar - mu0)' Sigma0^-1 (xbar - mu0) over a full window of B0 samples.
double hotelling_t2(const std::vector<Sample>& window, const GaussianReference& ref);

/// Windowed Gaussian log-det GLR for a covariance change in the last B0
/// samples: t*logdet(S_1:t) - (t-B0)*logdet(S_1:t-B0) - B0*logdet(S_window),
/// each S the ML (1/n) covariance about its own segment mean.
double glr_stat(const std::vector<Sample>& history, int block_size);

/// Common streaming interface for the stopping-rule wrappers: feed one
/// sample, get the statistic once it is defined.
class StreamingStatistic {
public:
    virtual ~StreamingStatistic() = default;
    virtual std::optional<double> step(const Sample& sample) = 0;
};

class HotellingStatistic : public StreamingStatistic {
public:
    HotellingStatistic(GaussianReference ref, int block_size);
    std::optional<double> step(const Sample& sample) override;

private:
    GaussianReference ref_;
    int block_size_;
    std::deque<Sample> window_;
};

/// Streaming GLR with running prefix moments; matches glr_stat on the
/// accumulated history.
class GlrStatistic : public StreamingStatistic {
public:
    GlrStatistic(int dimension, int block_size);
    std::optional<double> step(const Sample& sample) override;

private:
    struct Moments {
        long count = 0;
        Eigen::VectorXd sum;
        Eigen::MatrixXd outer_sum;
    };

    int dimension_;
    int block_size_;
    Moments prefix_;
    std::deque<Moments> lagged_;     // prefix moments from B0 steps ago
    std::deque<Sample> window_;
    Moments window_moments_;         // running moments of the window samples
};

}  // namespace scanb
