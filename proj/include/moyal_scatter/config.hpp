#pragma once

#include <json.hpp>

#include "moyal_scatter/dynamics.hpp"

namespace msc {

// Raised on schema violations; message carries the JSON path of the
// offending field.
struct config_error : invalid_input {
    using invalid_input::invalid_input;
};

struct RunConfig {
    // model
    int q = 2;
    int p = 0;
    double theta = 0.0;
    double mass = 1.0;
    // grid
    double box_length = 16.0;
    int points_per_dim = 256;
    // potential
    std::string kind = "V0";
    double a_center = 0.0;
    double a_half_width = 0.5;
    double a_amplitude = 0.5;
    std::string b_shape = "gaussian";
    double b_width = 1.0;
    double b_amplitude = 1.0;
    double b_center = 0.0;
    // integrator
    std::string method = "rk4-interaction-picture";
    double dt = 1e-3;
    int dyson_order = 6;
    // coarser step used for full scattering-matrix evolutions
    double dt_matrix = 0.02;
    // fock
    int num_modes = 8;
    // tolerances
    double tol_algebraic = 1e-10;
    double tol_quadrature = 1e-6;
    double tol_integrator = 1e-7;
    unsigned long seed = 1;
    std::string out_dir = "out";
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

// Derived builders.
ModelParams model_of(const RunConfig& c);
SpatialGrid grid_of(const RunConfig& c, int points_override = 0);
PotentialProfile profile_of(const RunConfig& c, const SpatialGrid& grid);
IntegratorSpec integrator_of(const RunConfig& c);

}  // namespace msc
