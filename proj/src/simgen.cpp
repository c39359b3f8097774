#include "scanb/simgen.hpp"

#include <cmath>
#include <memory>

namespace scanb {

namespace {

constexpr double kLaplaceUnitVarScale = 0.70710678118654752440;  // 1/sqrt(2)

Sample gaussian(std::mt19937_64& rng, int d, double mean, double sd) {
    std::normal_distribution<double> normal(mean, sd);
    Sample s(d);
    for (int i = 0; i < d; ++i) s[i] = normal(rng);
    return s;
}

Sample draw_pre(std::mt19937_64& rng, CaseId, int d) {
    return gaussian(rng, d, 0.0, 1.0);
}

Sample draw_post(std::mt19937_64& rng, CaseId id, int d) {
    switch (id) {
        case CaseId::case1_mean_shift:
            return gaussian(rng, d, 1.0, 1.0);
        case CaseId::case2_partial_cov: {
            Sample s = gaussian(rng, d, 0.0, 1.0);
            const double sqrt2 = std::sqrt(2.0);
            for (int i = 0; i < 5 && i < d; ++i) s[i] *= sqrt2;
            return s;
        }
        case CaseId::case3_full_cov:
            return gaussian(rng, d, 0.0, std::sqrt(2.0));
        case CaseId::case4_mixture: {
            std::bernoulli_distribution small_component(0.7);
            const bool shrink = small_component(rng);
            return gaussian(rng, d, 0.0, shrink ? std::sqrt(0.1) : 1.0);
        }
        case CaseId::case5_laplace: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            Sample s(1);
            const double u = unif(rng) - 0.5;
            s[0] = -kLaplaceUnitVarScale * (u < 0 ? -1.0 : 1.0) *
                   std::log(1.0 - 2.0 * std::abs(u));
            return s;
        }
        case CaseId::null_only:
            return gaussian(rng, d, 0.0, 1.0);
    }
    throw InputError("draw_post: invalid case id");
}

}  // namespace

std::string to_string(CaseId id) {
    switch (id) {
        case CaseId::case1_mean_shift: return "case1-mean-shift";
        case CaseId::case2_partial_cov: return "case2-partial-cov";
        case CaseId::case3_full_cov: return "case3-full-cov";
        case CaseId::case4_mixture: return "case4-mixture";
        case CaseId::case5_laplace: return "case5-laplace";
        case CaseId::null_only: return "null-only";
    }
    return "?";
}

CaseId case_from_string(const std::string& name) {
    if (name == "case1-mean-shift" || name == "case1") return CaseId::case1_mean_shift;
    if (name == "case2-partial-cov" || name == "case2") return CaseId::case2_partial_cov;
    if (name == "case3-full-cov" || name == "case3") return CaseId::case3_full_cov;
    if (name == "case4-mixture" || name == "case4") return CaseId::case4_mixture;
    if (name == "case5-laplace" || name == "case5") return CaseId::case5_laplace;
    if (name == "null-only" || name == "null") return CaseId::null_only;
    throw InputError("unknown case id: " + name);
}

int case_dimension(CaseId id) {
    switch (id) {
        case CaseId::case1_mean_shift:
        case CaseId::case2_partial_cov:
        case CaseId::case3_full_cov:
        case CaseId::case4_mixture:
            return 10;
        case CaseId::case5_laplace:
            return 1;
        case CaseId::null_only:
            return 0;  // caller chooses
    }
    return 0;
}

void StreamSpec::validate() const {
    if (length < 0) throw InputError("StreamSpec: length must be nonnegative");
    if (tau < 0 || tau > length) throw InputError("StreamSpec: need 0 <= tau <= length");
    const int fixed = case_dimension(case_id);
    if (fixed != 0 && dimension != fixed) {
        throw InputError("StreamSpec: " + to_string(case_id) + " has dimension " +
                         std::to_string(fixed));
    }
    if (fixed == 0 && dimension < 1) {
        throw InputError("StreamSpec: dimension must be positive");
    }
}

StreamGen::StreamGen(StreamSpec spec)
    : spec_(spec), rng_(make_rng({spec.seed, 0x73747265616dULL /*"stream"*/})) {
    spec_.validate();
}

Sample StreamGen::next() {
    if (emitted_ >= spec_.length) throw InputError("StreamGen: stream exhausted");
    Sample s = emitted_ < spec_.tau ? draw_pre(rng_, spec_.case_id, spec_.dimension)
                                    : draw_post(rng_, spec_.case_id, spec_.dimension);
    ++emitted_;
    return s;
}

std::vector<Sample> generate(const StreamSpec& spec) {
    StreamGen gen(spec);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(spec.length));
    for (long i = 0; i < spec.length; ++i) out.push_back(gen.next());
    return out;
}

std::function<Sample()> null_sample_source(CaseId case_id, int dimension, std::uint64_t seed) {
    int d = case_dimension(case_id);
    if (d == 0) d = dimension > 0 ? dimension : 10;
    if (dimension > 0 && d != dimension) {
        throw InputError("null_sample_source: dimension conflicts with case definition");
    }
    auto rng = std::make_shared<std::mt19937_64>(make_rng({seed, 0x6e756c6cULL /*"null"*/}));
    return [rng, case_id, d]() { return draw_pre(*rng, case_id, d); };
}

ReferencePool generate_reference_pool(CaseId case_id, int size, std::uint64_t seed,
                                      int dimension) {
    if (size < 1) throw InputError("generate_reference_pool: size must be >= 1");
    int d = case_dimension(case_id);
    if (d == 0) d = dimension > 0 ? dimension : 10;
    auto rng = make_rng({seed, 0x706f6f6cULL /*"pool"*/});
    ReferencePool pool;
    pool.rng_seed = seed;
    pool.samples.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) pool.samples.push_back(draw_pre(rng, case_id, d));
    return pool;
}

}  // namespace scanb
