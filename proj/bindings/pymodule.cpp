#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstring>
#include <stdexcept>
#include <string>

#include "hyperpower/coeff.hpp"
#include "hyperpower/dense.hpp"
#include "hyperpower/generators.hpp"
#include "hyperpower/io.hpp"
#include "hyperpower/oracle.hpp"
#include "hyperpower/solver.hpp"

namespace py = pybind11;
using namespace hyperpower;

namespace {

template <typename Scalar>
DenseMatrix<Scalar> from_array(const py::array& a) {
    auto arr = py::array_t<Scalar, py::array::c_style | py::array::forcecast>::ensure(a);
    if (!arr || arr.ndim() != 2) {
        throw std::invalid_argument("expected a 2-D array");
    }
    DenseMatrix<Scalar> m(static_cast<std::size_t>(arr.shape(0)),
                          static_cast<std::size_t>(arr.shape(1)));
    std::memcpy(m.data().data(), arr.data(), sizeof(Scalar) * m.data().size());
    return m;
}

template <typename Scalar>
py::array to_array(const DenseMatrix<Scalar>& m) {
    py::array_t<Scalar> arr({m.rows(), m.cols()});
    std::memcpy(arr.mutable_data(), m.data().data(), sizeof(Scalar) * m.data().size());
    return arr;
}

bool is_complex_array(const py::array& a) { return a.dtype().kind() == 'c'; }

SolverConfig make_config(double eps, std::size_t max_iter, double denom_tol, bool denom_rel) {
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.max_iter = max_iter;
    cfg.denom_tol = denom_tol;
    cfg.denom_mode = denom_rel ? DenomMode::relative : DenomMode::absolute;
    cfg.record_trace = true;
    return cfg;
}

template <typename Scalar>
py::dict report_to_dict(const SolveReport<Scalar>& rep) {
    py::dict d;
    d["method"] = std::string(method_name(rep.method));
    d["x"] = to_array(rep.x);
    d["final_res"] = rep.final_res;
    d["iterations"] = rep.iterations;
    d["converged"] = rep.converged;
    d["matmul_count"] = rep.matmul_count;
    d["reason"] = rep.reason;
    py::list trace;
    for (const IterationRecord& r : rep.trace) {
        py::dict row;
        row["k"] = r.k;
        row["alpha"] = r.alpha;
        row["beta"] = r.beta;
        row["res_norm"] = r.res_norm;
        row["fallback"] = r.fallback;
        row["wall_ns"] = r.wall_ns;
        trace.append(row);
    }
    d["trace"] = trace;
    return d;
}

py::dict invert(const py::array& a, const std::string& method, double eps,
                std::size_t max_iter, double denom_tol, bool denom_rel) {
    const SolverConfig cfg = make_config(eps, max_iter, denom_tol, denom_rel);
    const MethodKind kind = parse_method(method);
    if (is_complex_array(a)) {
        return report_to_dict(run(from_array<std::complex<double>>(a), kind, cfg));
    }
    return report_to_dict(run(from_array<double>(a), kind, cfg));
}

py::dict gram(const py::array& f) {
    GramSystem g;
    if (is_complex_array(f)) {
        auto fm = from_array<std::complex<double>>(f);
        g = build_gram(fm, matmul(fm, fm));
    } else {
        auto fm = from_array<double>(f);
        g = build_gram(fm, matmul(fm, fm));
    }
    py::dict d;
    d["c00"] = g.c00;
    d["c01"] = g.c01;
    d["c11"] = g.c11;
    d["b1"] = g.b1;
    d["b2"] = g.b2;
    d["det"] = g.det;
    d["dim"] = g.dim;
    return d;
}

py::tuple solve_coeffs(const py::array& f, double denom_tol, bool denom_rel) {
    CoefficientResult c;
    const DenomMode mode = denom_rel ? DenomMode::relative : DenomMode::absolute;
    if (is_complex_array(f)) {
        auto fm = from_array<std::complex<double>>(f);
        c = solve_coefficients(build_gram(fm, matmul(fm, fm)), denom_tol, mode);
    } else {
        auto fm = from_array<double>(f);
        c = solve_coefficients(build_gram(fm, matmul(fm, fm)), denom_tol, mode);
    }
    return py::make_tuple(c.alpha, c.beta, c.fallback);
}

py::dict verify(const py::array& a, const std::string& method, double eps,
                std::size_t max_iter, double denom_tol, bool denom_rel, bool spectral) {
    if (is_complex_array(a)) {
        throw std::invalid_argument("verify: invariant battery is defined for real input");
    }
    const RealMatrix am = from_array<double>(a);
    const RealSolveReport rep = run(am, parse_method(method),
                                    make_config(eps, max_iter, denom_tol, denom_rel));
    const InvariantReport inv = check_invariants(rep, am, spectral);
    py::dict d;
    for (const InvariantCheck& c : inv.checks) {
        py::dict row;
        row["pass"] = c.pass;
        row["worst"] = c.worst;
        row["tol"] = c.tol;
        row["applied"] = c.applied;
        row["worst_iteration"] = c.worst_iteration;
        d[c.name.c_str()] = row;
    }
    d["all_pass"] = inv.all_pass();
    d["converged"] = rep.converged;
    d["iterations"] = rep.iterations;
    return d;
}

py::array generate(const std::string& kind, std::size_t n, std::uint64_t seed, double eig_a,
                   double eig_b) {
    GeneratorSpec spec;
    spec.kind = parse_generator(kind);
    spec.n = n;
    spec.seed = seed;
    spec.eig_a = eig_a;
    spec.eig_b = eig_b;
    MatrixVariant m = generate_matrix(spec);
    if (std::holds_alternative<RealMatrix>(m)) return to_array(std::get<RealMatrix>(m));
    return to_array(std::get<ComplexMatrix>(m));
}

py::array read_mm(const std::string& path) {
    MatrixVariant m = read_matrix_market(path);
    if (std::holds_alternative<RealMatrix>(m)) return to_array(std::get<RealMatrix>(m));
    return to_array(std::get<ComplexMatrix>(m));
}

void write_mm(const py::array& a, const std::string& path) {
    if (is_complex_array(a)) {
        write_matrix_market(from_array<std::complex<double>>(a), path);
    } else {
        write_matrix_market(from_array<double>(a), path);
    }
}

}  // namespace

PYBIND11_MODULE(_hyperpower, m) {
    m.doc() = "Dense matrix inversion by variable-coefficient Schultz-type iteration";

    m.def("invert", &invert, py::arg("a"), py::arg("method") = "sshp2",
          py::arg("eps") = 1e-10, py::arg("max_iter") = 1000, py::arg("denom_tol") = 0.0,
          py::arg("denom_rel") = false,
          "Run one method on a (real or complex) square matrix; returns the report "
          "as a dict with the approximate inverse under 'x'.");
    m.def("gram", &gram, py::arg("f"),
          "Gram system of a residual F (F^2 computed internally).");
    m.def("solve_coeffs", &solve_coeffs, py::arg("f"), py::arg("denom_tol") = 1e-12,
          py::arg("denom_rel") = false,
          "(alpha, beta, fallback) for a residual F.");
    m.def("jacobi_eigenvalues",
          [](const py::array& s) { return jacobi_eigenvalues(from_array<double>(s)); },
          py::arg("s"), "Ascending eigenvalues of a symmetric real matrix.");
    m.def("coeffs_from_spectrum",
          [](const std::vector<double>& lams) {
              const SpectrumDiag d = coeffs_from_spectrum(lams);
              return py::make_tuple(d.alpha, d.beta, d.degenerate);
          },
          py::arg("eigenvalues"), "(alpha, beta, degenerate) from the spectral formulas.");
    m.def("scalar_recurrence",
          [](const std::vector<double>& lams, std::size_t steps) {
              py::list out;
              for (const SpectrumDiag& s : scalar_recurrence(lams, steps)) {
                  py::dict d;
                  d["eigenvalues"] = s.eigenvalues;
                  d["alpha"] = s.alpha;
                  d["beta"] = s.beta;
                  d["degenerate"] = s.degenerate;
                  out.append(d);
              }
              return out;
          },
          py::arg("eigenvalues"), py::arg("steps"),
          "Evolve a spectrum through the scalar SSHP2 recurrence.");
    m.def("verify", &verify, py::arg("a"), py::arg("method") = "sshp2",
          py::arg("eps") = 1e-10, py::arg("max_iter") = 1000, py::arg("denom_tol") = 0.0,
          py::arg("denom_rel") = false, py::arg("spectral") = true,
          "Run a method and evaluate the full invariant battery.");
    m.def("generate", &generate, py::arg("kind"), py::arg("n"), py::arg("seed") = 0,
          py::arg("eig_a") = 0.0, py::arg("eig_b") = 0.0,
          "Deterministic test matrices: spd, diag-dominant, hilbert, two-eig, "
          "random-complex, symmetric.");
    m.def("read_matrix_market", &read_mm, py::arg("path"));
    m.def("write_matrix_market", &write_mm, py::arg("a"), py::arg("path"));
}
