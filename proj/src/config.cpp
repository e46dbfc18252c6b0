#include "moyal_scatter/config.hpp"

#include <fstream>

namespace msc {

namespace {

using nlohmann::json;

const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object())
        throw config_error(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw config_error(path + "/" + key + ": missing required field");
    return *it;
}

double number(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number()) throw config_error(path + "/" + key + ": expected a number");
    return v.get<double>();
}

int integer(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number_integer())
        throw config_error(path + "/" + key + ": expected an integer");
    return v.get<int>();
}

std::string str(const json& j, const std::string& key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_string()) throw config_error(path + "/" + key + ": expected a string");
    return v.get<std::string>();
}

double opt_number(const json& j, const std::string& key, double fallback,
                  const std::string& path) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number(j, key, path);
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
    RunConfig c;
    const json& model = member(j, "model", "");
    c.q = integer(model, "q", "/model");
    c.p = integer(model, "p", "/model");
    c.theta = number(model, "theta", "/model");
    c.mass = number(model, "mass", "/model");

    const json& grid = member(j, "grid", "");
    c.box_length = number(grid, "box_length", "/grid");
    c.points_per_dim = integer(grid, "points_per_dim", "/grid");

    const json& pot = member(j, "potential", "");
    c.kind = str(pot, "kind", "/potential");
    const json& a = member(pot, "a", "/potential");
    c.a_center = number(a, "center", "/potential/a");
    c.a_half_width = number(a, "half_width", "/potential/a");
    c.a_amplitude = number(a, "amplitude", "/potential/a");
    const json& b = member(pot, "b", "/potential");
    c.b_shape = str(b, "shape", "/potential/b");
    if (c.b_shape != "gaussian")
        throw config_error("/potential/b/shape: only 'gaussian' is supported");
    c.b_width = number(b, "width", "/potential/b");
    c.b_amplitude = number(b, "amplitude", "/potential/b");
    c.b_center = opt_number(b, "center", 0.0, "/potential/b");

    const json& integ = member(j, "integrator", "");
    c.method = str(integ, "method", "/integrator");
    c.dt = number(integ, "dt", "/integrator");
    c.dyson_order = integer(integ, "dyson_order", "/integrator");
    c.dt_matrix = opt_number(integ, "dt_matrix", 0.02, "/integrator");
    if (c.dt <= 0.0 || c.dt_matrix <= 0.0)
        throw config_error("/integrator/dt: must be positive");

    const json& fock = member(j, "fock", "");
    c.num_modes = integer(fock, "num_modes", "/fock");

    const json& tol = member(j, "tolerances", "");
    c.tol_algebraic = number(tol, "algebraic", "/tolerances");
    c.tol_quadrature = number(tol, "quadrature", "/tolerances");
    c.tol_integrator = number(tol, "integrator", "/tolerances");
    if (c.tol_algebraic <= 0 || c.tol_quadrature <= 0 || c.tol_integrator <= 0)
        throw config_error("/tolerances: all tolerances must be positive");

    const json& seed = member(j, "seed", "");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        throw config_error("/seed: expected an integer");
    c.seed = seed.get<unsigned long>();
    c.out_dir = j.contains("out_dir") ? str(j, "out_dir", "") : "out";

    // cross-field validation mirrors build_model/make_grid
    try {
        build_model(c.q, c.p, c.theta, c.mass);
    } catch (const invalid_input& e) {
        throw config_error(std::string("/model: ") + e.what());
    }
    try {
        make_grid(c.box_length, c.points_per_dim, c.q + c.p - 1);
    } catch (const invalid_input& e) {
        throw config_error(std::string("/grid: ") + e.what());
    }
    try {
        potential_kind_from_string(c.kind);
    } catch (const invalid_input& e) {
        throw config_error(std::string("/potential/kind: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
    return nlohmann::json{
        {"model", {{"q", c.q}, {"p", c.p}, {"theta", c.theta}, {"mass", c.mass}}},
        {"grid",
         {{"box_length", c.box_length}, {"points_per_dim", c.points_per_dim}}},
        {"potential",
         {{"kind", c.kind},
          {"a",
           {{"center", c.a_center},
            {"half_width", c.a_half_width},
            {"amplitude", c.a_amplitude}}},
          {"b",
           {{"shape", c.b_shape},
            {"width", c.b_width},
            {"amplitude", c.b_amplitude},
            {"center", c.b_center}}}}},
        {"integrator",
         {{"method", c.method},
          {"dt", c.dt},
          {"dyson_order", c.dyson_order},
          {"dt_matrix", c.dt_matrix}}},
        {"fock", {{"num_modes", c.num_modes}}},
        {"tolerances",
         {{"algebraic", c.tol_algebraic},
          {"quadrature", c.tol_quadrature},
          {"integrator", c.tol_integrator}}},
        {"seed", c.seed},
        {"out_dir", c.out_dir},
    };
}

ModelParams model_of(const RunConfig& c) {
    return build_model(c.q, c.p, c.theta, c.mass);
}

SpatialGrid grid_of(const RunConfig& c, int points_override) {
    const int n = points_override > 0 ? points_override : c.points_per_dim;
    return make_grid(c.box_length, n, c.q + c.p - 1);
}

PotentialProfile profile_of(const RunConfig& c, const SpatialGrid& grid) {
    PotentialProfile p;
    p.a = TimeBump{c.a_center, c.a_half_width, c.a_amplitude};
    std::vector<double> center(grid.dimension, c.b_center);
    p.b_space = gaussian(grid, c.b_width, c.b_amplitude, center);
    p.kind = potential_kind_from_string(c.kind);
    return p;
}

IntegratorSpec integrator_of(const RunConfig& c) {
    return IntegratorSpec{c.method, c.dt, c.dyson_order};
}

}  // namespace msc
