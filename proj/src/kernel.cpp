#include "scanb/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace scanb {

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::gaussian_rbf: return "gaussian-rbf";
        case KernelFamily::laplacian_rbf: return "laplacian-rbf";
        case KernelFamily::polynomial: return "polynomial";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian-rbf" || name == "gaussian") return KernelFamily::gaussian_rbf;
    if (name == "laplacian-rbf" || name == "laplacian") return KernelFamily::laplacian_rbf;
    if (name == "polynomial") return KernelFamily::polynomial;
    throw InputError("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
    if (is_rbf()) {
        if (!(bandwidth > 0.0)) {
            throw InputError("RBF kernel requires bandwidth > 0");
        }
    } else {
        if (!(offset > 0.0)) throw InputError("polynomial kernel requires offset a > 0");
        if (degree < 1) throw InputError("polynomial kernel requires degree >= 1");
    }
}

KernelSpec KernelSpec::gaussian(double sigma) {
    KernelSpec s;
    s.family = KernelFamily::gaussian_rbf;
    s.bandwidth = sigma;
    s.validate();
    return s;
}

KernelSpec KernelSpec::laplacian(double sigma) {
    KernelSpec s;
    s.family = KernelFamily::laplacian_rbf;
    s.bandwidth = sigma;
    s.validate();
    return s;
}

KernelSpec KernelSpec::polynomial(double a, int d) {
    KernelSpec s;
    s.family = KernelFamily::polynomial;
    s.offset = a;
    s.degree = d;
    s.validate();
    return s;
}

double eval_kernel(const KernelSpec& spec, const Sample& x, const Sample& y) {
    spec.validate();
    if (x.size() != y.size()) {
        throw InputError("eval_kernel: dimension mismatch (" +
                         std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
    switch (spec.family) {
        case KernelFamily::gaussian_rbf:
            return std::exp(-(x - y).squaredNorm() / (2.0 * spec.bandwidth * spec.bandwidth));
        case KernelFamily::laplacian_rbf:
            return std::exp(-(x - y).norm() / spec.bandwidth);
        case KernelFamily::polynomial:
            return std::pow(x.dot(y) + spec.offset, spec.degree);
    }
    throw InputError("eval_kernel: invalid family");
}

double median_bandwidth(const std::vector<Sample>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw InputError("median_bandwidth: need at least 2 samples");
    const Eigen::Index d = samples.front().size();
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (samples[i].size() != d) {
            throw InputError("median_bandwidth: dimension mismatch at sample " + std::to_string(i));
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            dist.push_back((samples[i] - samples[j]).norm());
        }
    }
    const std::size_t m = dist.size();
    auto mid = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    double med = *mid;
    if (m % 2 == 0) {
        // midpoint of the two central order statistics
        double lower = *std::max_element(dist.begin(), mid);
        med = 0.5 * (lower + med);
    }
    if (!(med > 0.0)) {
        throw DegenerateDataError("median_bandwidth: median pairwise distance is zero");
    }
    return med;
}

}  // namespace scanb
