#pragma once

#include <functional>
#include <vector>

#include "moyal_scatter/clifford.hpp"
#include "moyal_scatter/common.hpp"

namespace msc {

// Periodic spatial torus [-L/2, L/2)^s with n_g points per dimension.
//
// Position lattice: x_d = -L/2 + j*dx, j = 0..n_g-1.  Momentum lattice in
// FFT-natural order: index m per dimension carries momentum (2*pi/L)*m for
// m < n_g/2 and (2*pi/L)*(m - n_g) otherwise.  Flat site index is row-major
// over dimensions.
struct SpatialGrid {
    double box_length = 0.0;
    int points_per_dim = 0;
    int dimension = 0;
    int modes = 0;  // n_g^s
    double dx = 0.0;
    double dk = 0.0;
    std::vector<double> kvals;  // per-dim momentum value by FFT index

    int wrap(int m) const {
        const int n = points_per_dim;
        return ((m % n) + n) % n;
    }
    // multi-index of flat mode/site index (row-major)
    void unflatten(int flat, int* idx) const {
        for (int d = dimension - 1; d >= 0; --d) {
            idx[d] = flat % points_per_dim;
            flat /= points_per_dim;
        }
    }
    int flatten(const int* idx) const {
        int f = 0;
        for (int d = 0; d < dimension; ++d) f = f * points_per_dim + idx[d];
        return f;
    }
    double position(int j) const { return -box_length / 2.0 + j * dx; }
};

SpatialGrid make_grid(double box_length, int points_per_dim, int dimension);

// Complex samples on the position lattice, flat row-major.
struct GridFunction {
    VectorXcd values;
};

// Continuum-normalized Fourier transform on the lattice:
//   fhat(k) = (2 pi)^{-s/2} dx^s sum_x f(x) e^{-i k.x}
//   f(x)    = (2 pi)^{-s/2} dk^s sum_k fhat(k) e^{+i k.x}
// so that Parseval holds: dx^s sum |f|^2 = dk^s sum |fhat|^2.
VectorXcd to_momentum(const VectorXcd& position_values, const SpatialGrid& grid);
VectorXcd to_position(const VectorXcd& momentum_values, const SpatialGrid& grid);

inline VectorXcd to_momentum(const GridFunction& f, const SpatialGrid& g) {
    return to_momentum(f.values, g);
}

// Sample a callable of the position multi-vector.
GridFunction sample(const SpatialGrid& grid,
                    const std::function<cplx(const std::vector<double>&)>& fn);

// Centered Gaussian-type profile amp * exp(-|x-center|^2 / (2 width^2)).
GridFunction gaussian(const SpatialGrid& grid, double width, double amplitude,
                      const std::vector<double>& center = {});

// N spinor components on the lattice; position space, layout site*N + a.
struct GridSpinor {
    int N = 0;
    VectorXcd values;
};

GridSpinor make_spinor(const SpatialGrid& grid, int N);

// position-space spinor (site*N+a) <-> momentum coefficient vector (mode*N+a)
VectorXcd spinor_to_momentum(const GridSpinor& v, const SpatialGrid& grid);
GridSpinor spinor_from_momentum(const VectorXcd& vhat, const SpatialGrid& grid, int N);

// L2 inner products by quadrature (conjugate-linear in the first slot).
cplx inner_position(const GridSpinor& v, const GridSpinor& w, const SpatialGrid& grid);
cplx inner_momentum(const VectorXcd& vhat, const VectorXcd& what, const SpatialGrid& grid);
double norm_momentum(const VectorXcd& vhat, const SpatialGrid& grid);

}  // namespace msc
