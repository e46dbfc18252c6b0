#pragma once

#include "moyal_scatter/operators.hpp"

namespace msc {

enum class PotentialKind { V0, Vi, Vii };

PotentialKind potential_kind_from_string(const std::string& s);
std::string to_string(PotentialKind k);

// Discretized Moyal product, computed in momentum space as the twisted
// convolution
//   (f*g)^(k) = (2 pi)^{-s/2} sum_u fhat(k-u) e^{i u.Mk} ghat(u) dk^s ,
// with M the spatial Moyal block.  For theta = 0 the phase is identically 1
// and this is the exact pointwise product on the lattice.
GridFunction star_product(const GridFunction& f, const GridFunction& g,
                          const ModelParams& model, const SpatialGrid& grid);

// Scalar momentum-basis kernel of left/right Moyal multiplication by b
// (twist phase +/- i u.Mk); quadrature weight dk^s baked in.
MatrixXcd twisted_kernel(const GridFunction& b, const ModelParams& model,
                         const SpatialGrid& grid, int phase_sign);

// L_b / R_b acting componentwise on spinors.
OneParticleOperator left_mult_operator(const GridFunction& b, const ModelParams& model,
                                       const SpatialGrid& grid, const DiracRep& rep);
OneParticleOperator right_mult_operator(const GridFunction& b, const ModelParams& model,
                                        const SpatialGrid& grid, const DiracRep& rep);

// Analytic Gaussian profile amp * exp(-|x-center|^2 / (2 width^2)), used as
// an oracle input because its Fourier transform is known in closed form.
struct GaussianSpec {
    double width = 1.0;
    double amplitude = 1.0;
    std::vector<double> center;
};

// Independent oracle for the star product of two Gaussians: direct
// quadrature of the defining twisted-convolution double integral
//   (f*g)(x) = (2 pi)^{-s} int dk du e^{i k.x} fhat(k-u) e^{i u.Mk} ghat(u)
// on a uniform momentum box [-kmax, kmax]^s, evaluated at the probe points.
std::vector<cplx> star_gaussian_oracle(const GaussianSpec& f, const GaussianSpec& g,
                                       const ModelParams& model,
                                       const std::vector<std::vector<double>>& probes,
                                       double kmax = 10.0, int nk = 64);

// The spatial potential operator v (gamma^0 included):
//   V0:  gamma^0 mult(b),  Vi:  gamma^0 (L_b + R_b),  Vii: gamma^0 L_b R_b.
// The time factor a(t) (a(t)^2 for Vii) is applied by the dynamics module.
OneParticleOperator potential_operator(PotentialKind kind, const GridFunction& b,
                                       const ModelParams& model, const SpatialGrid& grid,
                                       const DiracRep& rep);

}  // namespace msc
