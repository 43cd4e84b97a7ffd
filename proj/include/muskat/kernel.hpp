#pragma once

#include <string>
#include <variant>

#include "muskat/field.hpp"

namespace muskat {

// Lattice quadrature of the full contour integral; the singular window reaches
// cutoff_cells grid cells (capped at half the shorter period).
struct DirectQuadrature {
    int cutoff_cells = 32;
};
// Exact linear symbol plus lattice quadrature of the nonlinear remainder;
// quad_refinement multiplies the angular resolution of the singular correction.
struct SplitSpectral {
    int quad_refinement = 1;
};
// As SplitSpectral with R replaced by its Taylor polynomial of degree 2 n_max.
struct SeriesTruncated {
    int n_max = 8;
};
using RhsMethod = std::variant<DirectQuadrature, SplitSpectral, SeriesTruncated>;

void validate(const RhsMethod& m);
std::string method_name(const RhsMethod& m);

// Integral prefactor that makes the linear part of the contour equation exactly
// -Lambda^{1+alpha}: C_{2,1+alpha}/(1+alpha); equals 1/(2 pi) at alpha = 0.
double contour_prefactor(double alpha);

ScalarField rhs_direct(const ScalarField& f, const AlphaParams& alpha, int cutoff_cells = 32);
ScalarField rhs_split(const ScalarField& f, const AlphaParams& alpha, int quad_refinement = 1);
ScalarField rhs_series(const ScalarField& f, const AlphaParams& alpha, int n_max);
ScalarField evaluate_rhs(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m);
// rhs + Lambda^{1+alpha} f, i.e. minus the nonlinear remainder N(f).
ScalarField nonlinear_part(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m);
// N(f) alone for the split and series methods.
ScalarField nonlinear_remainder(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m);

struct InitialNorms {
    double linf = 0.0;
    double l1 = 0.0;
};

struct KernelMonitors {
    double d3_value = 0.0;
    double d3_lower_bound = 0.0;
    double c_alpha_min = 0.0;
    double dyf_sup = 0.0;
};

// d3 at the maximum of f (exterior of the cell completed as on the plane with f = 0);
// c_alpha_min over every offset at the gradient maximum and a strided set of points.
KernelMonitors monitors(const ScalarField& f, const InitialNorms& f0, const AlphaParams& alpha);

// The kernel factor C_alpha(x,y) for slope d = D_y f(x), g = grad f(x).y/|y|.
double c_alpha_factor(double alpha, double d, double g);

// Worker threads for lattice sums; results are bit-identical for a fixed count.
void set_kernel_threads(int n);
int kernel_threads();

}  // namespace muskat
