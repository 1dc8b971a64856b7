#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "qkac/chaos.hpp"
#include "qkac/dynamics.hpp"
#include "qkac/error.hpp"
#include "qkac/experiment.hpp"

namespace py = pybind11;
using namespace qkac;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const CArray& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw DimensionMismatch("expected a square 2-d array");
    const auto n = static_cast<std::size_t>(a.shape(0));
    return ComplexMatrix(n, std::vector<Complex>(a.data(), a.data() + n * n));
}

CArray to_array(const ComplexMatrix& m) {
    const auto n = static_cast<py::ssize_t>(m.dim());
    CArray out({n, n});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

/// Number of sites of a dim x dim operator on (C^d)^{(x)N}.
TensorShape shape_of(std::size_t dim, std::size_t d) {
    if (d < 2) throw DimensionMismatch("local dimension must be at least 2");
    std::size_t sites = 0, total = 1;
    while (total < dim) {
        total *= d;
        ++sites;
    }
    if (total != dim || sites == 0) throw DimensionMismatch("dimension is not a power of d");
    return TensorShape(d, sites);
}

DensityOperator density(const CArray& a, std::size_t d) {
    const auto m = to_matrix(a);
    return validate(m, shape_of(m.dim(), d));
}

std::vector<ComplexMatrix> matrices(const std::vector<CArray>& as) {
    std::vector<ComplexMatrix> out;
    for (const auto& a : as) out.push_back(to_matrix(a));
    return out;
}

py::object cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return py::float_(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return py::int_(*i);
    return py::str(std::get<std::string>(c));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = kToolVersion;
    py::register_exception<Error>(m, "QkacError", PyExc_ValueError);

    m.def("herm_eigen", [](const CArray& a) {
        const auto eig = herm_eigen(to_matrix(a));
        return py::make_tuple(py::array_t<double>(eig.eigenvalues.size(), eig.eigenvalues.data()),
                              to_array(eig.eigenvectors));
    }, py::arg("a"), "Ascending eigenvalues and eigenvector columns of a Hermitian matrix.");
    m.def("trace_norm", [](const CArray& a) { return trace_norm(to_matrix(a)); }, py::arg("a"));
    m.def("operator_norm", [](const CArray& a) { return operator_norm(to_matrix(a)); }, py::arg("a"));

    m.def("partial_trace", [](const CArray& a, std::size_t d, const std::vector<int>& sites) {
        const auto mat = to_matrix(a);
        return to_array(partial_trace(mat, shape_of(mat.dim(), d), sites));
    }, py::arg("a"), py::arg("d"), py::arg("traced_sites"), "Trace out the 1-based sites.");
    m.def("tensor_power", [](const CArray& a, std::size_t n) { return to_array(tensor_power(to_matrix(a), n)); },
          py::arg("a"), py::arg("n"));

    m.def("random_density", [](std::size_t d, std::uint64_t seed) { return to_array(random_density(d, seed).matrix()); },
          py::arg("d"), py::arg("seed"));
    m.def("random_hermitian", [](std::size_t d, std::uint64_t seed, double norm) {
        return to_array(random_hermitian(d, seed, norm));
    }, py::arg("d"), py::arg("seed"), py::arg("norm_cap"));

    m.def("marginal", [](const CArray& rho_n, std::size_t d, std::size_t k) {
        return to_array(marginal(density(rho_n, d), k).matrix());
    }, py::arg("rho_n"), py::arg("d"), py::arg("k"));
    m.def("chaos_distance", [](const CArray& rho_n, const CArray& rho, std::size_t k) {
        const auto r = density(rho, static_cast<std::size_t>(rho.shape(0)));
        return chaos_distance(density(rho_n, r.dim()), r, k);
    }, py::arg("rho_n"), py::arg("rho"), py::arg("k"));
    m.def("empirical_variance", [](const CArray& rho_n, const CArray& rho, const CArray& a) {
        const auto r = density(rho, static_cast<std::size_t>(rho.shape(0)));
        return empirical_variance(density(rho_n, r.dim()), r, to_matrix(a));
    }, py::arg("rho_n"), py::arg("rho"), py::arg("a"));
    m.def("factorization_error", [](const CArray& rho_n, const CArray& rho, const std::vector<CArray>& as) {
        const auto r = density(rho, static_cast<std::size_t>(rho.shape(0)));
        return factorization_error(density(rho_n, r.dim()), r, matrices(as));
    }, py::arg("rho_n"), py::arg("rho"), py::arg("observables"));

    m.def("evolve_exact", [](const CArray& rho0, const CArray& a, const CArray& v, double t) {
        const MeanFieldSystem sys(to_matrix(a), to_matrix(v));
        return to_array(evolve_exact(density(rho0, sys.local_dim()), sys, t).matrix());
    }, py::arg("rho0"), py::arg("a"), py::arg("v"), py::arg("t"), "Exact N-body evolution under H_N.");
    m.def("integrate_hartree", [](const CArray& rho0, const CArray& a, const CArray& v, double t1, double step) {
        const MeanFieldSystem sys(to_matrix(a), to_matrix(v));
        const auto traj = integrate_hartree(density(rho0, sys.local_dim()), sys, 0.0, t1, step);
        py::list states;
        for (const auto& s : traj.states) states.append(to_array(s.matrix()));
        return py::make_tuple(traj.times, states);
    }, py::arg("rho0"), py::arg("a"), py::arg("v"), py::arg("t1"), py::arg("step"),
       "RK4 trajectory of the Hartree equation on [0, t1]: (times, states).");

    m.def("format_config", [](const std::string& text) { return format_config(parse_config(text)); },
          py::arg("text"), "Normalized text form of a config.");
    m.def("run_experiment", [](const std::string& text) {
        ResultTable table;
        {
            const auto cfg = parse_config(text);
            py::gil_scoped_release release;
            table = run_experiment(cfg);
        }
        py::dict out;
        out["metadata"] = table.metadata;
        out["schema"] = table.schema;
        py::list rows;
        for (const auto& row : table.rows) {
            py::list r;
            for (const auto& c : row) r.append(cell(c));
            rows.append(r);
        }
        out["rows"] = rows;
        return out;
    }, py::arg("config_text"), "Runs an experiment; returns {'metadata', 'schema', 'rows'}.");
}
