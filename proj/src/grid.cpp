#include "moyal_scatter/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace msc {

SpatialGrid make_grid(double box_length, int points_per_dim, int dimension) {
    if (box_length <= 0.0) throw invalid_input("make_grid: box_length must be positive");
    if (points_per_dim < 8 || points_per_dim % 2 != 0)
        throw invalid_input("make_grid: points_per_dim must be even and >= 8");
    if (dimension < 1 || dimension > 2)
        throw invalid_input("make_grid: dimension must be 1 or 2");
    SpatialGrid g;
    g.box_length = box_length;
    g.points_per_dim = points_per_dim;
    g.dimension = dimension;
    g.modes = 1;
    for (int d = 0; d < dimension; ++d) g.modes *= points_per_dim;
    g.dx = box_length / points_per_dim;
    g.dk = 2.0 * pi / box_length;
    g.kvals.resize(points_per_dim);
    for (int m = 0; m < points_per_dim; ++m) {
        const int mm = (m < points_per_dim / 2) ? m : m - points_per_dim;
        g.kvals[m] = g.dk * mm;
    }
    return g;
}

namespace {

// Cached FFTW plans with private scratch buffers (plans are not thread-safe
// to create; execution is serialized per plan by the cache mutex).
struct PlanEntry {
    fftw_plan plan;
    fftw_complex* buf;
    int size;
};

PlanEntry& get_plan(const SpatialGrid& grid, int sign) {
    static std::map<std::tuple<int, int, int>, PlanEntry> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(grid.dimension, grid.points_per_dim, sign);
    auto it = cache.find(key);
    if (it == cache.end()) {
        PlanEntry e;
        e.size = grid.modes;
        e.buf = fftw_alloc_complex(grid.modes);
        int dims[2] = {grid.points_per_dim, grid.points_per_dim};
        e.plan = fftw_plan_dft(grid.dimension, dims, e.buf, e.buf, sign, FFTW_ESTIMATE);
        it = cache.emplace(key, e).first;
    }
    return it->second;
}

std::mutex& fft_mutex() {
    static std::mutex m;
    return m;
}

// Executes the cached in-place transform on a copy of v.
VectorXcd run_fft(const VectorXcd& v, const SpatialGrid& grid, int sign) {
    std::lock_guard<std::mutex> lock(fft_mutex());
    PlanEntry& e = get_plan(grid, sign);
    for (int i = 0; i < e.size; ++i) {
        e.buf[i][0] = v[i].real();
        e.buf[i][1] = v[i].imag();
    }
    fftw_execute(e.plan);
    VectorXcd out(e.size);
    for (int i = 0; i < e.size; ++i) out[i] = cplx(e.buf[i][0], e.buf[i][1]);
    return out;
}

// (-1)^{sum of multi-index}: compensates the -L/2 origin offset per dim.
double origin_sign(const SpatialGrid& grid, int flat) {
    int idx[2] = {0, 0};
    grid.unflatten(flat, idx);
    int s = 0;
    for (int d = 0; d < grid.dimension; ++d) s += idx[d];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

VectorXcd to_momentum(const VectorXcd& position_values, const SpatialGrid& grid) {
    if (position_values.size() != grid.modes)
        throw invalid_input("to_momentum: size mismatch with grid");
    VectorXcd out = run_fft(position_values, grid, FFTW_FORWARD);
    const double norm =
        std::pow(2.0 * pi, -0.5 * grid.dimension) * std::pow(grid.dx, grid.dimension);
    for (int m = 0; m < grid.modes; ++m) out[m] *= norm * origin_sign(grid, m);
    return out;
}

VectorXcd to_position(const VectorXcd& momentum_values, const SpatialGrid& grid) {
    if (momentum_values.size() != grid.modes)
        throw invalid_input("to_position: size mismatch with grid");
    VectorXcd tmp = momentum_values;
    for (int m = 0; m < grid.modes; ++m) tmp[m] *= origin_sign(grid, m);
    VectorXcd out = run_fft(tmp, grid, FFTW_BACKWARD);
    const double norm =
        std::pow(2.0 * pi, -0.5 * grid.dimension) * std::pow(grid.dk, grid.dimension);
    return norm * out;
}

GridFunction sample(const SpatialGrid& grid,
                    const std::function<cplx(const std::vector<double>&)>& fn) {
    GridFunction f;
    f.values.resize(grid.modes);
    std::vector<double> x(grid.dimension);
    int idx[2] = {0, 0};
    for (int j = 0; j < grid.modes; ++j) {
        grid.unflatten(j, idx);
        for (int d = 0; d < grid.dimension; ++d) x[d] = grid.position(idx[d]);
        f.values[j] = fn(x);
    }
    return f;
}

GridFunction gaussian(const SpatialGrid& grid, double width, double amplitude,
                      const std::vector<double>& center) {
    std::vector<double> c(grid.dimension, 0.0);
    for (size_t d = 0; d < center.size() && d < c.size(); ++d) c[d] = center[d];
    return sample(grid, [&](const std::vector<double>& x) {
        double r2 = 0.0;
        for (int d = 0; d < grid.dimension; ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        return cplx(amplitude * std::exp(-r2 / (2.0 * width * width)), 0.0);
    });
}

GridSpinor make_spinor(const SpatialGrid& grid, int N) {
    GridSpinor v;
    v.N = N;
    v.values = VectorXcd::Zero(static_cast<long>(grid.modes) * N);
    return v;
}

VectorXcd spinor_to_momentum(const GridSpinor& v, const SpatialGrid& grid) {
    const int N = v.N;
    VectorXcd out(static_cast<long>(grid.modes) * N);
    VectorXcd comp(grid.modes);
    for (int a = 0; a < N; ++a) {
        for (int j = 0; j < grid.modes; ++j) comp[j] = v.values[static_cast<long>(j) * N + a];
        VectorXcd chat = to_momentum(comp, grid);
        for (int m = 0; m < grid.modes; ++m) out[static_cast<long>(m) * N + a] = chat[m];
    }
    return out;
}

GridSpinor spinor_from_momentum(const VectorXcd& vhat, const SpatialGrid& grid, int N) {
    if (vhat.size() != static_cast<long>(grid.modes) * N)
        throw invalid_input("spinor_from_momentum: size mismatch");
    GridSpinor v = make_spinor(grid, N);
    VectorXcd comp(grid.modes);
    for (int a = 0; a < N; ++a) {
        for (int m = 0; m < grid.modes; ++m) comp[m] = vhat[static_cast<long>(m) * N + a];
        VectorXcd cpos = to_position(comp, grid);
        for (int j = 0; j < grid.modes; ++j) v.values[static_cast<long>(j) * N + a] = cpos[j];
    }
    return v;
}

cplx inner_position(const GridSpinor& v, const GridSpinor& w, const SpatialGrid& grid) {
    if (v.values.size() != w.values.size())
        throw invalid_input("inner_position: size mismatch");
    return std::pow(grid.dx, grid.dimension) * v.values.dot(w.values);
}

cplx inner_momentum(const VectorXcd& vhat, const VectorXcd& what, const SpatialGrid& grid) {
    if (vhat.size() != what.size()) throw invalid_input("inner_momentum: size mismatch");
    return std::pow(grid.dk, grid.dimension) * vhat.dot(what);
}

double norm_momentum(const VectorXcd& vhat, const SpatialGrid& grid) {
    return std::sqrt(std::abs(inner_momentum(vhat, vhat, grid)));
}

}  // namespace msc
