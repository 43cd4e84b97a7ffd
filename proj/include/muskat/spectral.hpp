#pragma once

#include <array>

#include "muskat/field.hpp"

namespace muskat {

SpectralField forward(const ScalarField& f);
ScalarField inverse(const SpectralField& F);

// coeff(k) -> |k|^s coeff(k); the zero mode is always cleared.
SpectralField apply_fractional_laplacian(const SpectralField& F, double s);
ScalarField fractional_laplacian(const ScalarField& f, double s);

// Spectral partial derivative d1^p d2^q. Nyquist modes are cleared for odd orders.
ScalarField derivative(const ScalarField& f, int p, int q);
std::array<ScalarField, 2> gradient(const ScalarField& f);

struct Hessian {
    ScalarField xx, xy, yy;
};
Hessian hessian(const ScalarField& f);

// sum_{k != 0} |k|^s |coeff(k)|; the zero mode joins only for s == 0 on request.
double fourier_norm(const ScalarField& f, double s, bool include_zero_mode = false);

struct SupNorms {
    double linf = 0.0;
    double grad_linf = 0.0;
    double l1 = 0.0;
    double mass = 0.0;
};
// linf and grad_linf are the sup of the trigonometric interpolant, refined off-grid
// from the largest grid samples.
SupNorms sup_norms(const ScalarField& f);
// Plain grid maxima, no refinement.
SupNorms grid_norms(const ScalarField& f);

double l2_norm(const ScalarField& f);
// (sum (1+|k|^2)^k |coeff|^2 * area)^{1/2}.
double sobolev_norm(const ScalarField& f, int k);

// g(x) = f(x + d) through the shift theorem.
ScalarField translate(const ScalarField& f, double dx, double dy);

// Value and derivatives up to third order of the interpolant at an arbitrary point.
struct PointJet {
    double f = 0.0;
    double fx = 0.0, fy = 0.0;
    double fxx = 0.0, fxy = 0.0, fyy = 0.0;
    double fxxx = 0.0, fxxy = 0.0, fxyy = 0.0, fyyy = 0.0;
};
PointJet evaluate_jet(const SpectralField& F, double x, double y);

struct PeakLocation {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};
// Refined location of max f.
PeakLocation argmax(const ScalarField& f);
// Refined location of max |grad f|^2; value is that maximum.
PeakLocation grad_argmax(const ScalarField& f);

}  // namespace muskat
