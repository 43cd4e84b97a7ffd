#include "muskat/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

namespace muskat {

void GridSpec::validate() const {
    require(nx >= 16 && ny >= 16 && nx % 2 == 0 && ny % 2 == 0, "grid: nx, ny must be even and >= 16");
    require(std::isfinite(lx) && std::isfinite(ly) && lx > 0.0 && ly > 0.0, "grid: lx, ly must be > 0");
}

double GridSpec::kmax() const {
    const double k1 = 2.0 * std::numbers::pi * (nx / 2) / lx;
    const double k2 = 2.0 * std::numbers::pi * (ny / 2) / ly;
    return std::sqrt(k1 * k1 + k2 * k2);
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == g.size(), "field: value count does not match grid");
}

void ScalarField::require_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("field: non-finite value");
}

AlphaParams::AlphaParams(double alpha) : alpha_(alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
}

void AlphaParams::require_global_regime() const {
    require(alpha_ < 0.5, "alpha must be < 0.5 for the global-existence regime");
}

namespace {

// FFTW planning is not thread safe; plans are created once per shape and reused
// through the new-array execute interface.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

PlanPair plans_for(int nx, int ny) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard lock(plan_mutex);
    auto it = cache.find({nx, ny});
    if (it != cache.end()) return it->second;
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    auto* a = fftw_alloc_complex(n);
    auto* b = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(ny, nx, a, b, FFTW_FORWARD, flags);
    p.bwd = fftw_plan_dft_2d(ny, nx, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
    cache.emplace(std::make_pair(nx, ny), p);
    return p;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

// Multiplier m(kx, ky, i, j) applied in Fourier space.
template <class M>
ScalarField spectral_multiply(const ScalarField& f, M m) {
    SpectralField F = forward(f);
    const GridSpec& g = f.grid;
    for (int j = 0; j < g.ny; ++j) {
        const double ky = g.ky(j);
        for (int i = 0; i < g.nx; ++i) F.at(i, j) *= m(g.kx(i), ky, i, j);
    }
    return inverse(F);
}

}  // namespace

SpectralField forward(const ScalarField& f) {
    f.grid.validate();
    f.require_finite();
    const GridSpec& g = f.grid;
    std::vector<std::complex<double>> in(f.values.begin(), f.values.end());
    SpectralField F(g);
    fftw_execute_dft(plans_for(g.nx, g.ny).fwd, as_fftw(in.data()), as_fftw(F.coeffs.data()));
    const double scale = 1.0 / static_cast<double>(g.size());
    for (auto& c : F.coeffs) c *= scale;
    return F;
}

ScalarField inverse(const SpectralField& F) {
    const GridSpec& g = F.grid;
    g.validate();
    std::vector<std::complex<double>> in = F.coeffs, out(g.size());
    fftw_execute_dft(plans_for(g.nx, g.ny).bwd, as_fftw(in.data()), as_fftw(out.data()));
    ScalarField f(g);
    for (std::size_t n = 0; n < out.size(); ++n) f.values[n] = out[n].real();
    return f;
}

SpectralField apply_fractional_laplacian(const SpectralField& F, double s) {
    require(std::isfinite(s) && s >= 0.0, "fractional laplacian: s must be >= 0");
    SpectralField out = F;
    const GridSpec& g = F.grid;
    for (int j = 0; j < g.ny; ++j) {
        const double ky = g.ky(j);
        for (int i = 0; i < g.nx; ++i) {
            const double kx = g.kx(i);
            const double k2 = kx * kx + ky * ky;
            out.at(i, j) *= (k2 == 0.0) ? 0.0 : std::pow(k2, 0.5 * s);
        }
    }
    return out;
}

ScalarField fractional_laplacian(const ScalarField& f, double s) {
    return inverse(apply_fractional_laplacian(forward(f), s));
}

ScalarField derivative(const ScalarField& f, int p, int q) {
    require(p >= 0 && q >= 0, "derivative: orders must be >= 0");
    const int nx2 = f.grid.nx / 2, ny2 = f.grid.ny / 2;
    return spectral_multiply(f, [&](double kx, double ky, int i, int j) {
        if ((p % 2 == 1 && i == nx2) || (q % 2 == 1 && j == ny2)) return std::complex<double>(0.0);
        return std::pow(std::complex<double>(0.0, kx), p) * std::pow(std::complex<double>(0.0, ky), q);
    });
}

std::array<ScalarField, 2> gradient(const ScalarField& f) { return {derivative(f, 1, 0), derivative(f, 0, 1)}; }

Hessian hessian(const ScalarField& f) { return {derivative(f, 2, 0), derivative(f, 1, 1), derivative(f, 0, 2)}; }

double fourier_norm(const ScalarField& f, double s, bool include_zero_mode) {
    require(std::isfinite(s) && s >= 0.0, "fourier_norm: s must be >= 0");
    const SpectralField F = forward(f);
    const GridSpec& g = f.grid;
    double sum = 0.0, comp = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double ky = g.ky(j);
        for (int i = 0; i < g.nx; ++i) {
            const double kx = g.kx(i);
            const double k2 = kx * kx + ky * ky;
            double w;
            if (k2 == 0.0)
                w = (s == 0.0 && include_zero_mode) ? 1.0 : 0.0;
            else
                w = (s == 0.0) ? 1.0 : std::pow(k2, 0.5 * s);
            const double term = w * std::abs(F.at(i, j)) - comp;
            const double t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
    }
    return sum;
}

SupNorms grid_norms(const ScalarField& f) {
    SupNorms n;
    const auto grad = gradient(f);
    double gmax2 = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        n.linf = std::max(n.linf, std::abs(f.values[k]));
        gmax2 = std::max(gmax2, grad[0].values[k] * grad[0].values[k] + grad[1].values[k] * grad[1].values[k]);
    }
    n.grad_linf = std::sqrt(gmax2);
    double l1 = 0.0, cl1 = 0.0, m = 0.0, cm = 0.0;
    for (double v : f.values) {
        double y = std::abs(v) - cl1, t = l1 + y;
        cl1 = (t - l1) - y;
        l1 = t;
        y = v - cm;
        t = m + y;
        cm = (t - m) - y;
        m = t;
    }
    n.l1 = l1 * f.grid.cell_area();
    n.mass = m * f.grid.cell_area();
    return n;
}

PointJet evaluate_jet(const SpectralField& F, double x, double y) {
    const GridSpec& g = F.grid;
    using C = std::complex<double>;
    std::vector<C> ex(g.nx), ey(g.ny);
    for (int i = 0; i < g.nx; ++i) ex[i] = std::polar(1.0, g.kx(i) * x);
    for (int j = 0; j < g.ny; ++j) ey[j] = std::polar(1.0, g.ky(j) * y);
    // S[p][q] accumulates sum c (ikx)^p (iky)^q e^{ik.x}.
    C S[4][4] = {};
    for (int j = 0; j < g.ny; ++j) {
        C row[4] = {};
        for (int i = 0; i < g.nx; ++i) {
            const C ikx(0.0, g.kx(i));
            C t = F.at(i, j) * ex[i];
            for (int p = 0; p < 4; ++p) {
                row[p] += t;
                t *= ikx;
            }
        }
        const C iky(0.0, g.ky(j));
        for (int p = 0; p < 4; ++p) {
            C t = row[p] * ey[j];
            for (int q = 0; p + q < 4; ++q) {
                S[p][q] += t;
                t *= iky;
            }
        }
    }
    PointJet J;
    J.f = S[0][0].real();
    J.fx = S[1][0].real();
    J.fy = S[0][1].real();
    J.fxx = S[2][0].real();
    J.fxy = S[1][1].real();
    J.fyy = S[0][2].real();
    J.fxxx = S[3][0].real();
    J.fxxy = S[2][1].real();
    J.fxyy = S[1][2].real();
    J.fyyy = S[0][3].real();
    return J;
}

namespace {

constexpr int kRefineCandidates = 6;
constexpr int kNewtonIters = 12;

// Indices of the largest local maxima of a periodic grid function.
std::vector<std::size_t> top_local_maxima(const std::vector<double>& v, const GridSpec& g) {
    std::vector<std::size_t> idx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = v[static_cast<std::size_t>(j) * g.nx + i];
            bool peak = true;
            for (int dj = -1; dj <= 1 && peak; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (!di && !dj) continue;
                    const int ii = (i + di + g.nx) % g.nx, jj = (j + dj + g.ny) % g.ny;
                    if (v[static_cast<std::size_t>(jj) * g.nx + ii] > c) {
                        peak = false;
                        break;
                    }
                }
            if (peak) idx.push_back(static_cast<std::size_t>(j) * g.nx + i);
        }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b] || (v[a] == v[b] && a < b); });
    if (idx.size() > kRefineCandidates) idx.resize(kRefineCandidates);
    return idx;
}

// Damped Newton ascent of an objective; steps limited to one cell, best point kept.
template <class Eval>
PeakLocation newton_refine(const GridSpec& g, double x, double y, double start, Eval eval) {
    PeakLocation best{x, y, start};
    for (int it = 0; it < kNewtonIters; ++it) {
        double val, gx, gy, hxx, hxy, hyy;
        eval(x, y, val, gx, gy, hxx, hxy, hyy);
        if (val > best.value) best = {x, y, val};
        const double det = hxx * hyy - hxy * hxy;
        if (!(hxx < 0.0 && det > 0.0)) break;
        const double sx = -(hyy * gx - hxy * gy) / det, sy = -(-hxy * gx + hxx * gy) / det;
        if (std::abs(sx) > g.hx() || std::abs(sy) > g.hy()) break;
        x += sx;
        y += sy;
        if (std::abs(sx) < 1e-14 * g.lx && std::abs(sy) < 1e-14 * g.ly) {
            eval(x, y, val, gx, gy, hxx, hxy, hyy);
            if (val > best.value) best = {x, y, val};
            break;
        }
    }
    return best;
}

PeakLocation refine_value_max(const ScalarField& f, const SpectralField& F, double sign) {
    const GridSpec& g = f.grid;
    std::vector<double> a(f.values.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = sign * f.values[k];
    const auto cand = top_local_maxima(a, g);
    PeakLocation best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
    for (std::size_t k : cand) {
        const PeakLocation p = newton_refine(
            g, g.x(static_cast<int>(k % g.nx)), g.y(static_cast<int>(k / g.nx)), a[k],
            [&](double x, double y, double& val, double& gx, double& gy, double& hxx, double& hxy, double& hyy) {
                const PointJet J = evaluate_jet(F, x, y);
                val = sign * J.f;
                gx = sign * J.fx;
                gy = sign * J.fy;
                hxx = sign * J.fxx;
                hxy = sign * J.fxy;
                hyy = sign * J.fyy;
            });
        if (p.value > best.value) best = p;
    }
    return best;
}

PeakLocation refine_grad_max(const ScalarField& f, const SpectralField& F) {
    const GridSpec& g = f.grid;
    const auto grad = gradient(f);
    std::vector<double> a(f.values.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = grad[0].values[k] * grad[0].values[k] + grad[1].values[k] * grad[1].values[k];
    PeakLocation best{0.0, 0.0, -1.0};
    for (std::size_t k : top_local_maxima(a, g)) {
        // Phi = |grad f|^2: dPhi = 2 H g, d2Phi = 2 (H H + sum_m g_m d2 f_m).
        const PeakLocation p = newton_refine(
            g, g.x(static_cast<int>(k % g.nx)), g.y(static_cast<int>(k / g.nx)), a[k],
            [&](double x, double y, double& val, double& gx, double& gy, double& hxx, double& hxy, double& hyy) {
                const PointJet J = evaluate_jet(F, x, y);
                val = J.fx * J.fx + J.fy * J.fy;
                gx = 2.0 * (J.fxx * J.fx + J.fxy * J.fy);
                gy = 2.0 * (J.fxy * J.fx + J.fyy * J.fy);
                hxx = 2.0 * (J.fxx * J.fxx + J.fxy * J.fxy + J.fx * J.fxxx + J.fy * J.fxxy);
                hxy = 2.0 * (J.fxx * J.fxy + J.fxy * J.fyy + J.fx * J.fxxy + J.fy * J.fxyy);
                hyy = 2.0 * (J.fxy * J.fxy + J.fyy * J.fyy + J.fx * J.fxyy + J.fy * J.fyyy);
            });
        if (p.value > best.value) best = p;
    }
    return best;
}

}  // namespace

PeakLocation argmax(const ScalarField& f) { return refine_value_max(f, forward(f), 1.0); }

PeakLocation grad_argmax(const ScalarField& f) { return refine_grad_max(f, forward(f)); }

SupNorms sup_norms(const ScalarField& f) {
    SupNorms n = grid_norms(f);
    if (n.linf == 0.0 && n.grad_linf == 0.0) return n;
    const SpectralField F = forward(f);
    n.linf = std::max({n.linf, refine_value_max(f, F, 1.0).value, refine_value_max(f, F, -1.0).value});
    n.grad_linf = std::sqrt(std::max(n.grad_linf * n.grad_linf, refine_grad_max(f, F).value));
    return n;
}

double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_area());
}

double sobolev_norm(const ScalarField& f, int k) {
    require(k >= 0, "sobolev_norm: k must be >= 0");
    const SpectralField F = forward(f);
    const GridSpec& g = f.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
            s += std::pow(1.0 + k2, k) * std::norm(F.at(i, j));
        }
    return std::sqrt(s * g.lx * g.ly);
}

ScalarField translate(const ScalarField& f, double dx, double dy) {
    const int nx2 = f.grid.nx / 2, ny2 = f.grid.ny / 2;
    return spectral_multiply(f, [&](double kx, double ky, int i, int j) {
        // Nyquist modes keep only their real (cosine) shift to stay real.
        const double ax = (i == nx2) ? 0.0 : kx * dx;
        const double ay = (j == ny2) ? 0.0 : ky * dy;
        std::complex<double> m = std::polar(1.0, ax + ay);
        if (i == nx2) m *= std::cos(kx * dx);
        if (j == ny2) m *= std::cos(ky * dy);
        return m;
    });
}

}  // namespace muskat
