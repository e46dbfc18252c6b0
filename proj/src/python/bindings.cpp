#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "moyal_scatter/config.hpp"
#include "moyal_scatter/harness.hpp"
#include "moyal_scatter/moyal.hpp"

namespace py = pybind11;
using namespace msc;

namespace {

py::array_t<cplx> star_product_py(py::array_t<cplx, py::array::c_style> f,
                                  py::array_t<cplx, py::array::c_style> g, int q,
                                  int p, double theta, double mass,
                                  double box_length, int points_per_dim) {
    const ModelParams model = build_model(q, p, theta, mass);
    const SpatialGrid grid = make_grid(box_length, points_per_dim, model.s);
    if (f.size() != grid.modes || g.size() != grid.modes)
        throw py::value_error("star_product: arrays must have points_per_dim^s entries");
    GridFunction ff, gg;
    ff.values = Eigen::Map<const VectorXcd>(f.data(), grid.modes);
    gg.values = Eigen::Map<const VectorXcd>(g.data(), grid.modes);
    const GridFunction out = star_product(ff, gg, model, grid);
    py::array_t<cplx> res(grid.modes);
    Eigen::Map<VectorXcd>(res.mutable_data(), grid.modes) = out.values;
    return res;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "moyal-scatter: Dirac scattering off Moyal-deformed potentials";
    m.attr("__version__") = "0.1.0";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<invalid_input>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

    m.def("star_product", &star_product_py, py::arg("f"), py::arg("g"), py::arg("q"),
          py::arg("p"), py::arg("theta"), py::arg("mass"), py::arg("box_length"),
          py::arg("points_per_dim"),
          "Moyal star product of two flat (row-major) complex grid arrays.");

    m.def(
        "load_config",
        [](const std::string& path) { return config_to_json(load_config(path)).dump(); },
        py::arg("path"), "Load and validate a run configuration; returns its JSON echo.");

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_path,
           const std::string& out_dir, int refine) {
            RunConfig c = load_config(config_path);
            if (!out_dir.empty()) c.out_dir = out_dir;
            return run_subcommand(subcommand, c, refine);
        },
        py::arg("subcommand"), py::arg("config_path"), py::arg("out_dir") = "",
        py::arg("refine") = 3,
        "Run a pipeline subcommand; returns 0 on success, 1 on failing checks.");
}
