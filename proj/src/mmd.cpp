#include "scanb/mmd.hpp"

namespace scanb {

void Block::validate() const {
    if (samples.size() < 2) {
        throw InputError("Block: need at least 2 samples for a U-statistic");
    }
    const Eigen::Index d = samples.front().size();
    for (const Sample& s : samples) {
        if (s.size() != d) throw InputError("Block: samples have mixed dimensions");
    }
}

double h_statistic(const KernelSpec& spec, const Sample& xi, const Sample& xj,
                   const Sample& yi, const Sample& yj) {
    return eval_kernel(spec, xi, xj) + eval_kernel(spec, yi, yj) -
           eval_kernel(spec, xi, yj) - eval_kernel(spec, xj, yi);
}

double mmd2u_block(const KernelSpec& spec, const Block& x, const Block& y) {
    x.validate();
    y.validate();
    const std::size_t b = x.size();
    if (y.size() != b) throw InputError("mmd2u_block: blocks must have equal length");
    if (x.samples.front().size() != y.samples.front().size()) {
        throw InputError("mmd2u_block: block dimensions differ");
    }

    // Gram accumulation over the four cross-combinations, diagonal skipped.
    double acc = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = i + 1; j < b; ++j) {
            // h is symmetric under (i,j) swap, so sum unordered pairs twice.
            acc += 2.0 * h_statistic(spec, x.samples[i], x.samples[j],
                                     y.samples[i], y.samples[j]);
        }
    }
    return acc / (static_cast<double>(b) * static_cast<double>(b - 1));
}

}  // namespace scanb
