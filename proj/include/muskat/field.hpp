#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "muskat/error.hpp"

namespace muskat {

// Periodic grid [0,lx) x [0,ly); values are row-major with x1 fastest.
struct GridSpec {
    int nx = 64;
    int ny = 64;
    double lx = 2.0 * std::numbers::pi;
    double ly = 2.0 * std::numbers::pi;

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_area() const { return hx() * hy(); }
    double x(int i) const { return i * hx(); }
    double y(int j) const { return j * hy(); }
    // Signed mode index for storage index i of an n-point axis.
    static int mode(int i, int n) { return i < n / 2 ? i : i - n; }
    double kx(int i) const { return 2.0 * std::numbers::pi * mode(i, nx) / lx; }
    double ky(int j) const { return 2.0 * std::numbers::pi * mode(j, ny) / ly; }
    double kmax() const;

    bool operator==(const GridSpec&) const = default;
};

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g) : grid(g), values(g.size(), 0.0) {}
    ScalarField(const GridSpec& g, std::vector<double> v);

    double& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
    void require_finite() const;
};

// f(x) = sum_k coeffs(k) e^{ik.x}; coeffs stored on the same index layout as values.
struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.size(), 0.0) {}

    std::complex<double>& at(int i, int j) { return coeffs[static_cast<std::size_t>(j) * grid.nx + i]; }
    std::complex<double> at(int i, int j) const { return coeffs[static_cast<std::size_t>(j) * grid.nx + i]; }
};

class AlphaParams {
public:
    explicit AlphaParams(double alpha);
    double alpha() const { return alpha_; }
    // Kernel exponent (3+alpha)/2.
    double beta() const { return 0.5 * (3.0 + alpha_); }
    // Order of the linear dissipation 1+alpha.
    double order() const { return 1.0 + alpha_; }
    // Throws unless 0 <= alpha < 1/2.
    void require_global_regime() const;

private:
    double alpha_;
};

}  // namespace muskat
