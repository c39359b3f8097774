#pragma once

#include "scanb/common.hpp"

namespace scanb {

enum class KernelFamily { gaussian_rbf, laplacian_rbf, polynomial };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Kernel family plus its parameters. RBF families use `bandwidth` (sigma);
/// the polynomial kernel uses `offset` (a) and `degree` (d).
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian_rbf;
    double bandwidth = 1.0;
    double offset = 1.0;
    int degree = 2;

    void validate() const;
    bool is_rbf() const { return family != KernelFamily::polynomial; }

    static KernelSpec gaussian(double sigma);
    static KernelSpec laplacian(double sigma);
    static KernelSpec polynomial(double a, int d);
};

/// k(x, y) per the family formula. Symmetric; RBF values lie in (0, 1].
double eval_kernel(const KernelSpec& spec, const Sample& x, const Sample& y);

/// Median of the n(n-1)/2 pairwise Euclidean distances (the "median trick").
/// Even-length median is the midpoint of the two central order statistics.
/// Throws DegenerateDataError when the median is zero.
double median_bandwidth(const std::vector<Sample>& samples);

}  // namespace scanb
