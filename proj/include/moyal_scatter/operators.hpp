#pragma once

#include <string>

#include "moyal_scatter/clifford.hpp"
#include "moyal_scatter/grid.hpp"

namespace msc {

// Dense operator on the discretized one-particle space, momentum basis,
// flat index = mode * N + spinor component.  With the continuum-normalized
// transforms the discrete Hilbert-Schmidt norm of the operator is exactly
// the Frobenius norm of this matrix (the dk^s weights cancel).
struct OneParticleOperator {
    MatrixXcd mat;
    std::string label;
};

VectorXcd apply(const OneParticleOperator& op, const VectorXcd& vhat);

double hs_norm(const OneParticleOperator& op);
double hs_norm(const MatrixXcd& mat);

// Largest singular value by power iteration on A^dagger A; deterministic
// for a given seed.
double op_norm_estimate(const MatrixXcd& mat, int iters = 60, unsigned seed = 7);

// Antilinear operator acting as v -> mat * conj(v).
struct AntilinearOp {
    MatrixXcd mat;
    VectorXcd apply(const VectorXcd& v) const { return mat * v.conjugate(); }
};

// Charge conjugation in the momentum basis: (Cv)^(k) = K conj(vhat(-k)).
AntilinearOp charge_conjugation(const SpatialGrid& grid, const DiracRep& rep);

// Block-diagonal spinor matrix (same N x N block on every mode).
MatrixXcd blockdiag_spinor(const MatrixXcd& block, const SpatialGrid& grid);

// Flat binary snapshot: 8-byte magic "MSCOPER1", int64 rows, int64 cols,
// then rows*cols little-endian complex128 values row-major.  A JSON sidecar
// at <path>.json records basis, label, and shape.  Round trip is bit-exact.
void save_operator(const std::string& path, const OneParticleOperator& op,
                   const std::string& basis = "momentum");
OneParticleOperator load_operator(const std::string& path);

void save_matrix_binary(const std::string& path, const MatrixXcd& mat);
MatrixXcd load_matrix_binary(const std::string& path);

}  // namespace msc
