#pragma once

#include "scanb/kernel.hpp"

namespace scanb {

enum class BlockOrigin { reference, test };

/// A block of B samples sharing one dimension.
struct Block {
    std::vector<Sample> samples;
    BlockOrigin origin = BlockOrigin::reference;

    std::size_t size() const { return samples.size(); }
    void validate() const;
};

/// U-statistic kernel h(xi,xj,yi,yj) = k(xi,xj) + k(yi,yj) - k(xi,yj) - k(xj,yi).
double h_statistic(const KernelSpec& spec, const Sample& xi, const Sample& xj,
                   const Sample& yi, const Sample& yj);

/// Unbiased block estimator of MMD^2:
/// (B(B-1))^-1 * sum over ordered pairs i != j of h(x_i, x_j, y_i, y_j).
double mmd2u_block(const KernelSpec& spec, const Block& x, const Block& y);

}  // namespace scanb
