#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ptsim/commands.hpp"
#include "ptsim/config.hpp"
#include "ptsim/error.hpp"
#include "ptsim/interference.hpp"
#include "ptsim/linalg.hpp"
#include "ptsim/lindblad.hpp"
#include "ptsim/network.hpp"
#include "ptsim/validation.hpp"

namespace py = pybind11;
using namespace ptsim;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D array");
    CMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
    return m;
}

ComplexArray to_array(const CMatrix& m) {
    ComplexArray a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
    return a;
}

py::dict curve_to_dict(const CoincidenceCurve& c) {
    std::vector<double> g, pb, pf;
    for (const auto& p : c.points) {
        g.push_back(p.gamma);
        pb.push_back(p.p_boson);
        pf.push_back(p.p_fermion);
    }
    py::dict d;
    const py::module_ np = py::module_::import("numpy");
    d["gamma"] = np.attr("asarray")(g);
    d["p_boson"] = np.attr("asarray")(pb);
    d["p_fermion"] = np.attr("asarray")(pf);
    d["method"] = std::string(c.points.empty() ? "" : to_string(c.points.front().method));
    d["spec_digest"] = c.spec_digest;
    return d;
}

SectionLayout make_layout(const std::vector<std::pair<double, bool>>& sections, const std::string& mode) {
    SectionLayout l;
    for (const auto& [len, loss] : sections) l.sections.push_back({len, loss});
    if (mode == "physical") {
        l.rotation_mode = RotationMode::physical;
    } else if (mode == "abstract") {
        l.rotation_mode = RotationMode::abstract;
    } else {
        throw ValidationError("rotation_mode must be 'physical' or 'abstract'");
    }
    return l;
}

}  // namespace

PYBIND11_MODULE(_ptsim, m) {
    m.doc() = "Coincidence probabilities and exceptional points in lossy linear optical networks";

    static py::exception<Error> base(m, "PtsimError");
    static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
    static py::exception<NotFoundError> not_found(m, "NotFoundError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            PyErr_SetString(validation.ptr(), e.what());
        } catch (const NumericalError& e) {
            PyErr_SetString(numerical.ptr(), e.what());
        } catch (const NotFoundError& e) {
            PyErr_SetString(not_found.ptr(), e.what());
        } catch (const Error& e) {
            PyErr_SetString(base.ptr(), e.what());
        }
    });

    // Kernels.
    m.def("mat_exp", [](const ComplexArray& a, double t) { return to_array(mat_exp(to_matrix(a), t)); },
          py::arg("a"), py::arg("t") = 1.0);
    m.def("permanent", [](const ComplexArray& a) { return permanent(to_matrix(a)); });
    m.def("determinant", [](const ComplexArray& a) { return determinant(to_matrix(a)); });
    m.def("schur", [](const ComplexArray& a) {
        const SchurFactorization f = schur_decompose(to_matrix(a));
        return py::make_tuple(to_array(f.rotation), to_array(f.triangular));
    }, "Returns (rotation, triangular) with a = rotation @ triangular @ rotation^H.");

    py::class_<ModeNetworkSpec>(m, "ModeNetworkSpec")
        .def(py::init([](const ComplexArray& coupling, std::vector<double> loss) {
                 return ModeNetworkSpec(to_matrix(coupling), std::move(loss));
             }),
             py::arg("coupling"), py::arg("loss_profile"))
        .def_static("coupler", &ModeNetworkSpec::coupler, py::arg("kappa"))
        .def_property_readonly("n_modes", &ModeNetworkSpec::n_modes)
        .def_property_readonly("coupling", [](const ModeNetworkSpec& s) { return to_array(s.coupling()); })
        .def_property_readonly("loss_profile", &ModeNetworkSpec::loss_profile)
        .def("effective_hamiltonian",
             [](const ModeNetworkSpec& s, double g) { return to_array(build_effective_hamiltonian(s, g)); },
             py::arg("gamma"))
        .def("eigenvalues", [](const ModeNetworkSpec& s, double g) { return spectral_report(s, g).eigenvalues; },
             py::arg("gamma"));

    py::class_<SectionLayout>(m, "SectionLayout")
        .def(py::init(&make_layout), py::arg("sections"), py::arg("rotation_mode") = "physical",
             "sections: list of (length, loss_on) pairs")
        .def_static("coupler_physical", &coupler_physical_layout, py::arg("kappa"), py::arg("l2"))
        .def_static("coupler_abstract", &coupler_abstract_layout, py::arg("l2"))
        .def_property_readonly("total_length", &SectionLayout::total_length)
        .def_property_readonly("lossy_length", &SectionLayout::lossy_length);

    m.def("find_ep_threshold",
          [](const ModeNetworkSpec& s, double lo, double hi) { return find_ep_threshold(s, lo, hi).gamma; },
          py::arg("spec"), py::arg("gamma_lo"), py::arg("gamma_hi"));
    m.def("rotation_at_threshold", [](const ModeNetworkSpec& s, double g) {
        const SchurFactorization f = rotation_at_threshold(s, g);
        return py::make_tuple(to_array(f.rotation), to_array(f.triangular));
    }, py::arg("spec"), py::arg("gamma_th"));

    m.def("protocol_rotation",
          [](const ModeNetworkSpec& s, const SectionLayout& l, double lo, double hi) {
              return to_array(protocol_rotation(s, l, lo, hi));
          },
          py::arg("spec"), py::arg("layout"), py::arg("gamma_lo"), py::arg("gamma_hi"));
    m.def("sweep",
          [](const ModeNetworkSpec& s, const SectionLayout& l, const std::vector<double>& grid,
             const std::string& method, std::optional<ComplexArray> rotation) {
              const CMatrix r = rotation ? to_matrix(*rotation) : CMatrix::identity(s.n_modes());
              switch (parse_method(method)) {
                  case Method::scattering: return curve_to_dict(sweep_gamma(s, l, r, grid));
                  case Method::lindblad: return curve_to_dict(sweep_lindblad(s, l, r, grid));
                  case Method::closed_form: return curve_to_dict(sweep_closed_form(s, l, grid));
              }
              throw ValidationError("unknown method");
          },
          py::arg("spec"), py::arg("layout"), py::arg("gammas"), py::arg("method") = "scattering",
          py::arg("rotation") = py::none());
    m.def("find_crossing",
          [](const ModeNetworkSpec& s, const SectionLayout& l, double lo, double hi,
             std::optional<ComplexArray> rotation) {
              const CMatrix r = rotation ? to_matrix(*rotation) : CMatrix::identity(s.n_modes());
              return find_crossing(s, l, r, lo, hi).gamma;
          },
          py::arg("spec"), py::arg("layout"), py::arg("gamma_lo"), py::arg("gamma_hi"),
          py::arg("rotation") = py::none());
    m.def("coupler_closed_form",
          [](double kappa, double gamma, double l2, const std::string& statistics) {
              if (statistics != "boson" && statistics != "fermion")
                  throw ValidationError("statistics must be 'boson' or 'fermion'");
              return coupler_closed_form(kappa, gamma, l2,
                                         statistics == "boson" ? Statistics::boson : Statistics::fermion);
          },
          py::arg("kappa"), py::arg("gamma"), py::arg("l2"), py::arg("statistics"));

    // Config-driven entry points, mirroring the CLI.
    m.def("run", [](const std::string& config_path, const std::string& command) {
        const RunConfig config = load_config(config_path);
        std::ostringstream out, err;
        const int status = run_command(config, parse_command(command), out, err);
        return py::make_tuple(status, out.str(), err.str());
    }, py::arg("config_path"), py::arg("command"), "Returns (exit_status, stdout, stderr).");
    m.def("validate", [](const std::string& config_path) {
        const ValidationReport r = run_validation(load_config(config_path));
        py::list checks;
        for (const auto& c : r.checks) {
            py::dict d;
            d["name"] = c.name;
            d["passed"] = c.passed;
            d["skipped"] = c.skipped;
            d["worst"] = c.worst;
            d["tolerance"] = c.tolerance;
            checks.append(d);
        }
        return checks;
    }, py::arg("config_path"));
}
