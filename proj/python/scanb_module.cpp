#include "scanb/calibration.hpp"
#include "scanb/detector.hpp"
#include "scanb/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace scanb;

namespace {

std::vector<Sample> rows_of(const Eigen::MatrixXd& m) {
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
    return out;
}

Eigen::MatrixXd matrix_of(const std::vector<Sample>& rows) {
    if (rows.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return m;
}

KernelSpec make_spec(const std::string& family, double sigma, double offset, int degree) {
    const KernelFamily f = kernel_family_from_string(family);
    switch (f) {
        case KernelFamily::gaussian_rbf: return KernelSpec::gaussian(sigma);
        case KernelFamily::laplacian_rbf: return KernelSpec::laplacian(sigma);
        case KernelFamily::polynomial: return KernelSpec::polynomial(offset, degree);
    }
    throw InputError("invalid kernel family");
}

Block block_of(const Eigen::MatrixXd& m, BlockOrigin origin) {
    Block b;
    b.samples = rows_of(m);
    b.origin = origin;
    return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Online kernel change-point detection (scan B-statistic)";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    m.def(
        "eval_kernel",
        [](const std::string& family, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
           double sigma, double offset, int degree) {
            return eval_kernel(make_spec(family, sigma, offset, degree), x, y);
        },
        py::arg("family"), py::arg("x"), py::arg("y"), py::arg("sigma") = 1.0,
        py::arg("offset") = 1.0, py::arg("degree") = 2);

    m.def(
        "median_bandwidth",
        [](const Eigen::MatrixXd& samples) { return median_bandwidth(rows_of(samples)); },
        py::arg("samples"), "Median pairwise Euclidean distance of the rows");

    m.def(
        "h_statistic",
        [](const std::string& family, const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
           const Eigen::VectorXd& yi, const Eigen::VectorXd& yj, double sigma, double offset,
           int degree) {
            return h_statistic(make_spec(family, sigma, offset, degree), xi, xj, yi, yj);
        },
        py::arg("family"), py::arg("xi"), py::arg("xj"), py::arg("yi"), py::arg("yj"),
        py::arg("sigma") = 1.0, py::arg("offset") = 1.0, py::arg("degree") = 2);

    m.def(
        "mmd2u",
        [](const std::string& family, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
           double sigma, double offset, int degree) {
            return mmd2u_block(make_spec(family, sigma, offset, degree),
                               block_of(x, BlockOrigin::reference),
                               block_of(y, BlockOrigin::test));
        },
        py::arg("family"), py::arg("x"), py::arg("y"), py::arg("sigma") = 1.0,
        py::arg("offset") = 1.0, py::arg("degree") = 2,
        "Unbiased block MMD^2 between two equal-size sample blocks (rows)");

    m.def("nu", &nu, py::arg("mu"));
    m.def("arl_approx", &arl_approx, py::arg("threshold"), py::arg("block_size"));
    m.def(
        "threshold_for_arl",
        [](double target_arl, int block_size) {
            return threshold_for_arl(target_arl, block_size);
        },
        py::arg("target_arl"), py::arg("block_size"));

    m.def(
        "generate",
        [](const std::string& case_name, long tau, long length, std::uint64_t seed, int dim) {
            StreamSpec spec;
            spec.case_id = case_from_string(case_name);
            spec.dimension = case_dimension(spec.case_id);
            if (spec.dimension == 0) spec.dimension = dim > 0 ? dim : 10;
            spec.tau = tau;
            spec.length = length;
            spec.seed = seed;
            return matrix_of(generate(spec));
        },
        py::arg("case_id"), py::arg("tau"), py::arg("length"), py::arg("seed"),
        py::arg("dim") = 0, "Synthetic stream: tau pre-change rows, then post-change rows");

    m.def(
        "hotelling_t2",
        [](const Eigen::MatrixXd& window, const Eigen::MatrixXd& reference) {
            return hotelling_t2(rows_of(window), fit_reference(rows_of(reference)));
        },
        py::arg("window"), py::arg("reference"));

    m.def(
        "glr_stat",
        [](const Eigen::MatrixXd& history, int block_size) {
            return glr_stat(rows_of(history), block_size);
        },
        py::arg("history"), py::arg("block_size"));

    py::class_<VarianceEstimate>(m, "VarianceEstimate")
        .def_readonly("e_h2", &VarianceEstimate::e_h2)
        .def_readonly("cov_hh", &VarianceEstimate::cov_hh)
        .def_readonly("combined", &VarianceEstimate::combined)
        .def_readonly("tuples_used", &VarianceEstimate::tuples_used);

    py::class_<Detector>(m, "Detector")
        .def(py::init([](const Eigen::MatrixXd& pool, int b0, int n, const std::string& family,
                         double sigma, double threshold, std::uint64_t seed,
                         const std::string& subsampling, int tuple_budget) {
                 DetectorConfig config;
                 config.block_size = b0;
                 config.num_blocks = n;
                 config.kernel = make_spec(family, sigma, 1.0, 2);
                 config.threshold = threshold;
                 config.subsampling = subsampling_from_string(subsampling);
                 config.tuple_budget = tuple_budget;
                 ReferencePool rp;
                 rp.samples = rows_of(pool);
                 rp.rng_seed = seed;
                 return Detector(config, std::move(rp));
             }),
             py::arg("pool"), py::arg("b0"), py::arg("n"), py::arg("kernel"), py::arg("sigma"),
             py::arg("threshold"), py::arg("seed") = 1, py::arg("subsampling") = "random",
             py::arg("tuple_budget") = 2000)
        .def(
            "step",
            [](Detector& self, const Eigen::VectorXd& sample) {
                const Decision d = self.step(sample);
                const char* kind = d.kind == DecisionKind::alarm       ? "alarm"
                                   : d.kind == DecisionKind::not_ready ? "not-ready"
                                                                       : "continue";
                return py::make_tuple(kind, d.t,
                                      d.statistic ? py::cast(*d.statistic) : py::none());
            },
            py::arg("sample"), "Feed one sample; returns (decision, t, statistic)")
        .def_property_readonly("variance", &Detector::variance)
        .def_property_readonly("t", &Detector::time);
}
