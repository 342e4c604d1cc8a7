#pragma once

#include "holab/model.hpp"

#include <span>

namespace holab {

// Pointwise coefficients of the Heckman-Opdam Laplacian. The simulated
// processes have generator 1/2 L, so the drift below is half of the
// first-order coefficient and jump intensities are half of c_alpha.

/// b(x) = 1/2 sum_{alpha>0} k_alpha coth(<alpha,x>/2) alpha. Throws SingularInput on a wall.
Vec drift(const Model& model, const Vec& x);

/// c_alpha(x) = k_alpha |alpha|^2 / (4 sinh^2(<alpha,x>/2)) for positive root index i.
double jump_coefficient(const Model& model, std::size_t root, const Vec& x);

/// Intensity 1/2 c_alpha(x) of the jump x -> r_alpha x.
double jump_rate(const Model& model, std::size_t root, const Vec& x);

/// Drift and all positive-root jump intensities in one pass (one exp per
/// root). No wall check: the caller guarantees x is regular.
/// Returns the total intensity.
double coefficients_unchecked(const Model& model, const Vec& x, Vec& drift_out, std::span<double> rates_out);

/// Finite-difference L f(x) including reflection terms (evaluated exactly).
double apply_laplacian_fd(const Model& model, const ScalarField& f, const Vec& x, double h = 1e-3);

/// Same without reflection terms: the W-invariant restriction L.
double apply_radial_laplacian_fd(const Model& model, const ScalarField& f, const Vec& x, double h = 1e-3);

/// Finite-difference Dunkl-Cherednik operator T_xi f(x).
double apply_cherednik_fd(const Model& model, const Vec& xi, const ScalarField& f, const Vec& x, double h = 1e-3);

/// sum_i T_{e_i}(T_{e_i} f)(x) - |rho|^2 f(x) by nested finite differences.
/// Equals L f(x) up to O(h^2).
double cherednik_square_sum_fd(const Model& model, const ScalarField& f, const Vec& x, double h = 1e-3);

}  // namespace holab
