#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "moyal_scatter/config.hpp"
#include "moyal_scatter/harness.hpp"
#include "moyal_scatter/operators.hpp"

using namespace msc;
using nlohmann::json;

namespace {

json valid_config() {
    return json::parse(R"({
      "model": {"q": 2, "p": 0, "theta": 0.0, "mass": 1.0},
      "grid": {"box_length": 16.0, "points_per_dim": 64},
      "potential": {
        "kind": "V0",
        "a": {"center": 0.0, "half_width": 0.5, "amplitude": 0.5},
        "b": {"shape": "gaussian", "width": 1.0, "amplitude": 1.0, "center": 0.0}
      },
      "integrator": {"method": "rk4-interaction-picture", "dt": 0.001,
                     "dyson_order": 6, "dt_matrix": 0.02},
      "fock": {"num_modes": 6},
      "tolerances": {"algebraic": 1e-10, "quadrature": 1e-6, "integrator": 1e-7},
      "seed": 42,
      "out_dir": "out/test"
    })");
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("msc_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("io_config") {

TEST_CASE("valid config parses and round-trips") {
    const RunConfig c = parse_config(valid_config());
    CHECK(c.q == 2);
    CHECK(c.points_per_dim == 64);
    CHECK(c.a_half_width == doctest::Approx(0.5));
    CHECK(c.num_modes == 6);
    CHECK(c.seed == 42);

    // echo -> parse is the identity
    const RunConfig c2 = parse_config(config_to_json(c));
    CHECK(config_to_json(c) == config_to_json(c2));
}

TEST_CASE("schema errors carry the json path") {
    json j = valid_config();
    j["model"].erase("q");
    try {
        parse_config(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("model/q") != std::string::npos);
    }

    j = valid_config();
    j["integrator"]["dt"] = -0.1;
    CHECK_THROWS_AS(parse_config(j), config_error);

    j = valid_config();
    j["potential"]["kind"] = "V9";
    CHECK_THROWS_AS(parse_config(j), config_error);

    j = valid_config();
    j["grid"]["points_per_dim"] = "many";
    try {
        parse_config(j);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("grid/points_per_dim") != std::string::npos);
    }

    j = valid_config();
    j["model"]["p"] = 3;  // odd moyal block
    CHECK_THROWS_AS(parse_config(j), config_error);
}

TEST_CASE("missing config file is an io error, bad json a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/path/cfg.json"), std::runtime_error);

    TempDir tmp;
    const auto p = tmp.path / "broken.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_AS(load_config(p.string()), config_error);
}

TEST_CASE("operator snapshots round-trip bit-exactly") {
    TempDir tmp;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    OneParticleOperator op;
    op.label = "test_operator";
    op.mat = MatrixXcd(13, 7);
    for (int r = 0; r < 13; ++r)
        for (int c = 0; c < 7; ++c) op.mat(r, c) = cplx(nd(rng), nd(rng));
    // exercise non-trivial bit patterns as well
    op.mat(0, 0) = cplx(0.1 + 0.2, -1.0 / 3.0);
    op.mat(1, 1) = cplx(0.0, -0.0);

    const std::string path = (tmp.path / "op.bin").string();
    save_operator(path, op);
    const OneParticleOperator back = load_operator(path);
    REQUIRE(back.mat.rows() == 13);
    REQUIRE(back.mat.cols() == 7);
    CHECK(back.label == "test_operator");
    CHECK(std::memcmp(op.mat.data(), back.mat.data(),
                      sizeof(cplx) * 13 * 7) == 0);

    // sidecar records the shape
    const json sidecar = json::parse(std::ifstream(path + ".json"));
    CHECK(sidecar["rows"] == 13);
    CHECK(sidecar["cols"] == 7);
    CHECK(sidecar["label"] == "test_operator");

    CHECK_THROWS(load_operator((tmp.path / "missing.bin").string()));
}

TEST_CASE("run report json is deterministic and ordered") {
    RunReport a, b;
    a.subcommand = b.subcommand = "star-check";
    a.add_check("z.second", 1e-9, 1e-8);
    a.add_check("a.first", 2e-9, 1e-8);
    b.add_check("a.first", 2e-9, 1e-8);
    b.add_check("z.second", 1e-9, 1e-8);
    a.timings_s["x"] = 1.0;  // timings never enter the report body
    CHECK(a.to_json().dump(2) == b.to_json().dump(2));
    CHECK(a.to_json()["checks"][0]["name"] == "a.first");
    CHECK(a.all_passed());

    RunReport c;
    c.add_check("bad.residual", std::nan(""), 1e-8);
    CHECK(!c.all_passed());
    CHECK(c.failing() == std::vector<std::string>{"bad.residual"});
    // non-finite residuals serialize as a large sentinel, keeping valid json
    CHECK(c.to_json()["checks"][0]["residual"].get<double>() > 1e100);
}

}  // TEST_SUITE
