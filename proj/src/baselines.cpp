#include "scanb/baselines.hpp"

#include <cmath>

namespace scanb {

namespace {

// log det of a symmetric positive-definite matrix via Cholesky; a failed
// factorization maps to the degenerate-data error.
double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DegenerateDataError(std::string(what) + ": covariance is not positive definite");
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// ML (1/n-denominator) covariance about the segment's own mean.
Eigen::MatrixXd ml_covariance(const std::vector<Sample>& seg, std::size_t begin,
                              std::size_t end) {
    const Eigen::Index d = seg.front().size();
    const double n = static_cast<double>(end - begin);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (std::size_t i = begin; i < end; ++i) mean += seg[i];
    mean /= n;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = begin; i < end; ++i) {
        const Eigen::VectorXd c = seg[i] - mean;
        cov.noalias() += c * c.transpose();
    }
    return cov / n;
}

}  // namespace

GaussianReference fit_reference(const std::vector<Sample>& samples) {
    if (samples.empty()) throw InputError("fit_reference: no samples");
    const Eigen::Index d = samples.front().size();
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n <= d) {
        throw InputError("fit_reference: need more samples than dimensions (" +
                         std::to_string(n) + " <= " + std::to_string(d) + ")");
    }
    GaussianReference ref;
    ref.mean = Eigen::VectorXd::Zero(d);
    for (const Sample& s : samples) {
        if (s.size() != d) throw InputError("fit_reference: mixed sample dimensions");
        ref.mean += s;
    }
    ref.mean /= static_cast<double>(n);
    ref.covariance = Eigen::MatrixXd::Zero(d, d);
    for (const Sample& s : samples) {
        const Eigen::VectorXd c = s - ref.mean;
        ref.covariance.noalias() += c * c.transpose();
    }
    ref.covariance /= static_cast<double>(n - 1);
    Eigen::LLT<Eigen::MatrixXd> llt(ref.covariance);
    if (llt.info() != Eigen::Success) {
        throw DegenerateDataError("fit_reference: singular sample covariance");
    }
    ref.covariance_inverse = llt.solve(Eigen::MatrixXd::Identity(d, d));
    return ref;
}

double hotelling_t2(const std::vector<Sample>& window, const GaussianReference& ref) {
    if (window.empty()) throw InputError("hotelling_t2: empty window");
    const Eigen::Index d = ref.mean.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const Sample& s : window) {
        if (s.size() != d) throw InputError("hotelling_t2: dimension mismatch");
        mean += s;
    }
    mean /= static_cast<double>(window.size());
    const Eigen::VectorXd c = mean - ref.mean;
    return static_cast<double>(window.size()) * c.dot(ref.covariance_inverse * c);
}

double glr_stat(const std::vector<Sample>& history, int block_size) {
    if (history.empty()) throw InputError("glr_stat: empty history");
    const auto t = static_cast<long>(history.size());
    const Eigen::Index d = history.front().size();
    if (t <= block_size + d) {
        throw InputError("glr_stat: need history longer than B0 + d");
    }
    const auto n = static_cast<std::size_t>(t);
    const auto cut = static_cast<std::size_t>(t - block_size);
    const double ld_full = logdet_spd(ml_covariance(history, 0, n), "glr_stat full segment");
    const double ld_pre = logdet_spd(ml_covariance(history, 0, cut), "glr_stat prefix");
    const double ld_win = logdet_spd(ml_covariance(history, cut, n), "glr_stat window");
    return static_cast<double>(t) * ld_full - static_cast<double>(t - block_size) * ld_pre -
           static_cast<double>(block_size) * ld_win;
}

HotellingStatistic::HotellingStatistic(GaussianReference ref, int block_size)
    : ref_(std::move(ref)), block_size_(block_size) {
    if (block_size_ < 1) throw ConfigError("HotellingStatistic: block_size must be >= 1");
}

std::optional<double> HotellingStatistic::step(const Sample& sample) {
    window_.push_back(sample);
    if (static_cast<int>(window_.size()) > block_size_) window_.pop_front();
    if (static_cast<int>(window_.size()) < block_size_) return std::nullopt;
    const std::vector<Sample> w(window_.begin(), window_.end());
    return hotelling_t2(w, ref_);
}

GlrStatistic::GlrStatistic(int dimension, int block_size)
    : dimension_(dimension), block_size_(block_size) {
    if (dimension_ < 1) throw ConfigError("GlrStatistic: dimension must be >= 1");
    if (block_size_ < 2) throw ConfigError("GlrStatistic: block_size must be >= 2");
    prefix_.sum = Eigen::VectorXd::Zero(dimension_);
    prefix_.outer_sum = Eigen::MatrixXd::Zero(dimension_, dimension_);
    window_moments_.sum = Eigen::VectorXd::Zero(dimension_);
    window_moments_.outer_sum = Eigen::MatrixXd::Zero(dimension_, dimension_);
}

std::optional<double> GlrStatistic::step(const Sample& sample) {
    if (sample.size() != dimension_) throw InputError("GlrStatistic: dimension mismatch");
    prefix_.count += 1;
    prefix_.sum += sample;
    prefix_.outer_sum.noalias() += sample * sample.transpose();
    lagged_.push_back(prefix_);
    if (static_cast<int>(lagged_.size()) > block_size_ + 1) lagged_.pop_front();
    window_.push_back(sample);
    window_moments_.count += 1;
    window_moments_.sum += sample;
    window_moments_.outer_sum.noalias() += sample * sample.transpose();
    if (static_cast<int>(window_.size()) > block_size_) {
        const Sample& old = window_.front();
        window_moments_.count -= 1;
        window_moments_.sum -= old;
        window_moments_.outer_sum.noalias() -= old * old.transpose();
        window_.pop_front();
    }

    const long t = prefix_.count;
    if (t <= block_size_ + dimension_) return std::nullopt;

    auto cov_of = [&](const Moments& m) {
        const double n = static_cast<double>(m.count);
        const Eigen::VectorXd mean = m.sum / n;
        return Eigen::MatrixXd(m.outer_sum / n - mean * mean.transpose());
    };
    const Moments& pre = lagged_.front();  // prefix moments at t - B0
    const double ld_full = logdet_spd(cov_of(prefix_), "GlrStatistic full segment");
    const double ld_pre = logdet_spd(cov_of(pre), "GlrStatistic prefix");
    const double ld_win = logdet_spd(cov_of(window_moments_), "GlrStatistic window");
    return static_cast<double>(t) * ld_full -
           static_cast<double>(t - block_size_) * ld_pre -
           static_cast<double>(block_size_) * ld_win;
}

}  // namespace scanb
