#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aeplab/aep.hpp"
#include "aeplab/codec.hpp"
#include "aeplab/ergodic.hpp"
#include "aeplab/errors.hpp"
#include "aeplab/report.hpp"
#include "aeplab/selftest.hpp"
#include "aeplab/source_model.hpp"

namespace py = pybind11;
using namespace aeplab;

namespace {

// SourceModel is a std::variant, which pybind11's stl casters would try to
// unpack alternative by alternative; a dedicated handle type keeps the model
// opaque on the Python side.
struct PyModel {
    SourceModel value;
};

// Reports are built as canonical JSON on the C++ side; hand them to Python
// as plain dicts through the stdlib json parser.
py::object to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_aeplab, m) {
    m.doc() = "finite-size laboratory for the entropy equipartition of ergodic quantum "
              "spin chains";

    py::register_exception<CapacityError>(m, "CapacityError");
    py::register_exception<StructuralError>(m, "StructuralError");
    py::register_exception<ContractError>(m, "ContractError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<ParameterError>(m, "ParameterError");
    py::register_exception<UnsupportedError>(m, "UnsupportedError");

    py::class_<PyModel>(m, "Model")
        .def_property_readonly("site_dim",
                               [](const PyModel& s) { return site_dim(s.value); })
        .def_property_readonly("hash", [](const PyModel& s) { return model_hash(s.value); })
        .def_property_readonly(
            "diagonal_blocks",
            [](const PyModel& s) { return yields_diagonal_blocks(s.value); })
        .def("__repr__", [](const PyModel& s) {
            return "<aeplab.Model " + model_hash(s.value) + ">";
        });

    m.def(
        "load_model", [](const std::string& path) { return PyModel{load_model(path)}; },
        py::arg("path"), "Load a model definition from a JSON file.");
    m.def(
        "parse_model", [](const std::string& text) { return PyModel{parse_model(text)}; },
        py::arg("text"), "Parse a model definition from JSON text.");

    m.def(
        "mean_entropy", [](const PyModel& model) { return mean_entropy(model.value); },
        py::arg("model"), "Mean entropy s in nats per site.");
    m.def(
        "block_entropy",
        [](const PyModel& model, std::size_t n, std::size_t max_dim) {
            return block_entropy(model.value, n, max_dim);
        },
        py::arg("model"), py::arg("n"), py::arg("max_dim") = kDefaultMaxDim,
        "Von Neumann entropy of the n-block in nats.");
    m.def(
        "block_spectrum",
        [](const PyModel& model, std::size_t n, std::size_t max_dim) {
            return block_spectrum(block_density(model.value, n, max_dim)).values;
        },
        py::arg("model"), py::arg("n"), py::arg("max_dim") = kDefaultMaxDim,
        "Eigenvalues of the n-block, descending.");
    m.def(
        "beta",
        [](const PyModel& model, std::size_t n, double epsilon, std::size_t max_dim) {
            const BetaResult b = beta(block_density(model.value, n, max_dim), epsilon);
            return py::dict(py::arg("n") = b.n, py::arg("epsilon") = b.epsilon,
                            py::arg("count") = b.count, py::arg("beta") = b.beta,
                            py::arg("rate") = b.rate);
        },
        py::arg("model"), py::arg("n"), py::arg("epsilon"),
        py::arg("max_dim") = kDefaultMaxDim,
        "Minimal projector log-dimension at mass level 1 - epsilon.");

    m.def(
        "analyze",
        [](const PyModel& model, std::size_t n, std::vector<double> epsilons, double delta,
           std::optional<double> delta_prime, std::size_t max_dim) {
            return to_py(analyze_report(model.value,
                                        AnalyzeOptions{n, std::move(epsilons), delta,
                                                       delta_prime, max_dim}));
        },
        py::arg("model"), py::arg("n") = 8,
        py::arg("epsilons") = std::vector<double>{0.1, 0.01}, py::arg("delta") = 0.1,
        py::arg("delta_prime") = std::nullopt, py::arg("max_dim") = kDefaultMaxDim,
        "Single-block report (entropy, beta, level sets, typical window).");
    m.def(
        "sweep",
        [](const PyModel& model, std::size_t n_max, std::vector<double> epsilons,
           double delta, std::size_t max_dim) {
            return to_py(sweep_report(
                model.value, SweepOptions{n_max, std::move(epsilons), delta, max_dim}));
        },
        py::arg("model"), py::arg("n_max") = 12,
        py::arg("epsilons") = std::vector<double>{0.1, 0.01}, py::arg("delta") = 0.1,
        py::arg("max_dim") = kDefaultMaxDim, "Convergence table over n = 1..n_max.");
    m.def(
        "decompose",
        [](const PyModel& model, std::size_t l_max, double eta) {
            return to_py(decompose_report(model.value, DecomposeOptions{l_max, eta}));
        },
        py::arg("model"), py::arg("l_max") = 16, py::arg("eta") = 0.05,
        "Sublattice ergodic decompositions for l = 1..l_max.");
    m.def(
        "compress",
        [](const PyModel& model, std::size_t n, double delta,
           std::optional<double> delta_prime, std::size_t trials, std::uint64_t seed,
           std::size_t max_dim) {
            return to_py(compress_report(
                model.value, CompressOptions{n, delta, delta_prime, trials, seed, max_dim}));
        },
        py::arg("model"), py::arg("n") = 8, py::arg("delta") = 0.1,
        py::arg("delta_prime") = std::nullopt, py::arg("trials") = 2000, py::arg("seed") = 0,
        py::arg("max_dim") = kDefaultMaxDim,
        "Typical-subspace codec with Monte-Carlo ensemble fidelity.");
    m.def("selftest", [] { return to_py(selftest_report()); },
          "Cross-check the library against its built-in oracles.");
}
