#pragma once

#include <vector>

#include "moyal_scatter/common.hpp"

namespace msc {

// Model dimensions and the deformation matrix.
//
// q commutative directions (time included), p Moyal-paired spatial
// directions, n = q+p total, s = n-1 spatial.  The deformation matrix M is
// n x n with vanishing first row/column (time stays commutative) and the
// standard symplectic theta/2 block on the p-pair; M_spatial is its s x s
// spatial restriction, the only part entering momentum-space kernels.
struct ModelParams {
    int q = 0;
    int p = 0;
    int n = 0;
    int s = 0;
    double theta = 0.0;
    double mass = 0.0;
    MatrixXd M;
    MatrixXd M_spatial;
};

ModelParams build_model(int q, int p, double theta, double mass);

// A fixed reference Dirac representation for the supported dimensions.
// Charge conjugation is antilinear and stored as matrix-plus-conjugation:
// C v = K * conj(v).
struct DiracRep {
    int N = 0;
    std::vector<MatrixXcd> gammas;  // gamma_0 .. gamma_s
    MatrixXcd conj_matrix;          // K
    VectorXd metric;                // diag(1,-1,...,-1)
};

DiracRep build_dirac_rep(const ModelParams& model);

}  // namespace msc
