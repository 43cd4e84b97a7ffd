#include "muskat/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

#include "muskat/spectral.hpp"
#include "muskat/special_functions.hpp"

namespace muskat {

namespace {

using GL = boost::math::quadrature::gauss<double, 30>;

constexpr double kPi = std::numbers::pi;
constexpr int kImageShells = 16;
constexpr int kAngularSplit = 32;
constexpr int kAngularFull = 64;
constexpr int kMaxPolyDegree = 28;
constexpr double kPolyTol = 1e-17;
constexpr int kMaxRow = 4096;
// Offsets summed plainly before one compensated add into the accumulator.
constexpr int kBlockOffsets = 32;
constexpr int kChunks = 8;
// Safety factor on the refined gradient sup used as a bound for lattice slopes.
constexpr double kSlopeMargin = 1.1;

std::atomic<int> g_threads{1};

struct Offset {
    int p, q;
    double y1, y2, r2, w;
};

// Lattice offsets of the cell [-n/2, n/2]^2 with trapezoid edge weights, origin excluded,
// in radial-then-angular order.
std::vector<Offset> cell_offsets(const GridSpec& g) {
    std::vector<Offset> v;
    const double area = g.cell_area();
    for (int q = -g.ny / 2; q <= g.ny / 2; ++q)
        for (int p = -g.nx / 2; p <= g.nx / 2; ++p) {
            if (p == 0 && q == 0) continue;
            double w = area;
            if (std::abs(p) == g.nx / 2) w *= 0.5;
            if (std::abs(q) == g.ny / 2) w *= 0.5;
            const double y1 = p * g.hx(), y2 = q * g.hy();
            v.push_back({p, q, y1, y2, y1 * y1 + y2 * y2, w});
        }
    std::sort(v.begin(), v.end(), [](const Offset& a, const Offset& b) {
        if (a.r2 != b.r2) return a.r2 < b.r2;
        return std::atan2(a.y2, a.y1) < std::atan2(b.y2, b.y1);
    });
    return v;
}

// One representative of each {y, -y} pair.
std::vector<Offset> half_offsets(const GridSpec& g) {
    std::vector<Offset> v;
    for (const Offset& o : cell_offsets(g))
        if (o.q > 0 || (o.q == 0 && o.p > 0)) v.push_back(o);
    return v;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

// C-infinity radial window: 1 on [0, ra], 0 beyond rb.
struct Window {
    double ra, rb;
    double operator()(double r) const {
        if (r <= ra) return 1.0;
        if (r >= rb) return 0.0;
        const double t = (r - ra) / (rb - ra);
        const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
        return b / (a + b);
    }
};

double window_radius(const GridSpec& g, int cells) {
    const double half = 0.5 * std::min(g.lx, g.ly);
    return std::min(half, cells * std::min(g.hx(), g.hy()));
}

// Angular rule for the singular correction. For a leading term Theta(theta) |y|^{-1-alpha}
// chi(|y|), the gap between its integral and its punctured lattice sum is sum_k v[k] Theta(theta_k).
struct AngularRule {
    std::vector<double> c, s, v;
};

std::shared_ptr<const AngularRule> build_rule(const GridSpec& g, double alpha, double rb, int n) {
    const Window chi{0.5 * rb, rb};
    // Radial moment int_0^inf r^{-alpha} chi(r) dr.
    double moment = std::pow(chi.ra, 1.0 - alpha) / (1.0 - alpha);
    constexpr int panels = 16;
    for (int k = 0; k < panels; ++k) {
        const double a = chi.ra + (chi.rb - chi.ra) * k / panels, b = chi.ra + (chi.rb - chi.ra) * (k + 1) / panels;
        moment += GL::integrate([&](double r) { return std::pow(r, -alpha) * chi(r); }, a, b);
    }
    const int mmax = n / 2 - 1;
    std::vector<std::complex<long double>> E(static_cast<std::size_t>(mmax + 1), 0.0L);
    for (const Offset& o : cell_offsets(g)) {
        const double r = std::sqrt(o.r2);
        if (r >= rb) continue;
        const long double rho = static_cast<long double>(o.w * chi(r) * std::pow(r, -1.0 - alpha));
        const double th = std::atan2(o.y2, o.y1);
        for (int m = 0; m <= mmax; ++m) {
            const std::complex<double> e = std::polar(1.0, m * th);
            E[m] -= rho * std::complex<long double>(e.real(), e.imag());
        }
    }
    E[0] += static_cast<long double>(2.0 * kPi * moment);
    auto rule = std::make_shared<AngularRule>();
    rule->c.resize(n);
    rule->s.resize(n);
    rule->v.resize(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        rule->c[k] = std::cos(th);
        rule->s[k] = std::sin(th);
        long double acc = E[0].real();
        for (int m = 1; m <= mmax; ++m) {
            const std::complex<double> e = std::polar(1.0, -m * th);
            acc += 2.0L * (E[m] * std::complex<long double>(e.real(), e.imag())).real();
        }
        rule->v[k] = static_cast<double>(acc / n);
    }
    return rule;
}

std::mutex cache_mutex;

using RuleKey = std::tuple<int, int, double, double, double, double, int>;

std::shared_ptr<const AngularRule> angular_rule(const GridSpec& g, double alpha, double rb, int n) {
    static std::map<RuleKey, std::shared_ptr<const AngularRule>> cache;
    const RuleKey key{g.nx, g.ny, g.lx, g.ly, alpha, rb, n};
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto rule = build_rule(g, alpha, rb, n);
    std::lock_guard lock(cache_mutex);
    return cache.emplace(key, rule).first->second;
}

// Periodic-image field W(y) = sum_{m != 0} (y + mL)/|y + mL|^{3+alpha}, shells up to
// kImageShells plus a continuum tail linear in y; stored as the Fourier transform of the
// weighted lattice array, ready for circular convolution.
struct ImageKernel {
    SpectralField w1, w2;
};

std::shared_ptr<const ImageKernel> build_images(const GridSpec& g, double alpha) {
    const double p = 3.0 + alpha;
    const double X = (kImageShells + 0.5) * g.lx, Y = (kImageShells + 0.5) * g.ly;
    auto face = [&](double a, double b) {
        double s = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double lo = -b + 2.0 * b * k / 8, hi = -b + 2.0 * b * (k + 1) / 8;
            s += GL::integrate([&](double t) { return a * std::pow(a * a + t * t, -0.5 * p); }, lo, hi);
        }
        return s;
    };
    const double area = g.lx * g.ly;
    const double t1 = -2.0 * face(X, Y) / area, t2 = -2.0 * face(Y, X) / area;
    ScalarField a1(g), a2(g);
    const double cell = g.cell_area();
    for (int q = -g.ny / 2; q <= g.ny / 2; ++q)
        for (int pp = -g.nx / 2; pp <= g.nx / 2; ++pp) {
            double w = cell;
            if (std::abs(pp) == g.nx / 2) w *= 0.5;
            if (std::abs(q) == g.ny / 2) w *= 0.5;
            const double y1 = pp * g.hx(), y2 = q * g.hy();
            double s1 = t1 * y1, s2 = t2 * y2;
            for (int m2 = -kImageShells; m2 <= kImageShells; ++m2)
                for (int m1 = -kImageShells; m1 <= kImageShells; ++m1) {
                    if (m1 == 0 && m2 == 0) continue;
                    const double z1 = y1 + m1 * g.lx, z2 = y2 + m2 * g.ly;
                    const double r2 = z1 * z1 + z2 * z2;
                    const double k = std::pow(r2, -0.5 * p);
                    s1 += z1 * k;
                    s2 += z2 * k;
                }
            a1.at(wrap(pp, g.nx), wrap(q, g.ny)) += w * s1;
            a2.at(wrap(pp, g.nx), wrap(q, g.ny)) += w * s2;
        }
    auto img = std::make_shared<ImageKernel>();
    img->w1 = forward(a1);
    img->w2 = forward(a2);
    const double n = static_cast<double>(g.size());
    for (auto& c : img->w1.coeffs) c *= n;
    for (auto& c : img->w2.coeffs) c *= n;
    return img;
}

std::shared_ptr<const ImageKernel> image_kernel(const GridSpec& g, double alpha) {
    static std::map<std::tuple<int, int, double, double, double>, std::shared_ptr<const ImageKernel>> cache;
    const auto key = std::make_tuple(g.nx, g.ny, g.lx, g.ly, alpha);
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto img = build_images(g, alpha);
    std::lock_guard lock(cache_mutex);
    return cache.emplace(key, img).first->second;
}

// Kernel nonlinearity as a function of u = D^2.
enum class Shape { Direct, Remainder, Series };

struct Nonlinearity {
    Shape shape;
    double beta;
    std::vector<double> c;  // Taylor coefficients in u
    int lead;

    Nonlinearity(Shape s, double alpha, int n_max = 0) : shape(s), beta(0.5 * (3.0 + alpha)) {
        if (shape == Shape::Series) {
            const CoeffTable t(alpha, n_max);
            c.assign(static_cast<std::size_t>(n_max + 1), 0.0);
            for (int n = 1; n <= n_max; ++n) c[n] = ((n % 2) ? 1.0 : -1.0) * t(n);
            lead = 1;
            return;
        }
        // (1+u)^{-beta} = sum b_k u^k.
        std::vector<double> b(kMaxPolyDegree + 2);
        b[0] = 1.0;
        for (int k = 1; k < static_cast<int>(b.size()); ++k) b[k] = b[k - 1] * (-beta - (k - 1)) / k;
        if (shape == Shape::Direct) {
            c = b;
            lead = 0;
        } else {
            c.assign(b.size(), 0.0);
            for (std::size_t k = 1; k < b.size(); ++k) c[k] = -b[k];
            lead = 1;
        }
    }

    double exact(double u) const {
        switch (shape) {
            case Shape::Direct:
                return beta == 1.5 ? 1.0 / ((1.0 + u) * std::sqrt(1.0 + u)) : std::pow(1.0 + u, -beta);
            case Shape::Remainder:
                return -std::expm1(-beta * std::log1p(u));
            case Shape::Series:
                return horner(u, static_cast<int>(c.size()) - 1);
        }
        return 0.0;
    }

    double horner(double u, int deg) const {
        double s = c[deg];
        for (int k = deg - 1; k >= 0; --k) s = s * u + c[k];
        return s;
    }

    // Smallest degree whose truncation is accurate to kPolyTol relative on [0, umax]; -1 if none.
    int degree_for(double umax) const {
        const int top = static_cast<int>(c.size()) - 1;
        if (shape == Shape::Series) return top;
        if (umax == 0.0) return lead;
        double pw = 1.0;
        for (int k = lead; k < top; ++k) {
            pw *= umax;
            if (std::abs(c[k + 1]) * pw <= kPolyTol * std::abs(c[lead])) return k;
        }
        return -1;
    }

    double operator()(double u) const {
        const int deg = degree_for(u);
        return deg >= 0 ? horner(u, deg) : exact(u);
    }

    // t[i] *= phi(u[i]).
    void apply(const double* u, double* t, int n, double umax) const {
        const int deg = degree_for(umax);
        if (deg >= 0) {
            // Horner by passes over the row so every pass vectorizes.
            double s[kMaxRow];
            for (int i = 0; i < n; ++i) s[i] = c[deg];
            for (int k = deg - 1; k >= 0; --k) {
                const double ck = c[k];
                for (int i = 0; i < n; ++i) s[i] = s[i] * u[i] + ck;
            }
            for (int i = 0; i < n; ++i) t[i] *= s[i];
            return;
        }
        if (shape == Shape::Direct && beta == 1.5) {
            for (int i = 0; i < n; ++i) {
                const double v = 1.0 + u[i];
                t[i] /= v * std::sqrt(v);
            }
            return;
        }
        for (int i = 0; i < n; ++i) t[i] *= exact(u[i]);
    }
};

inline void kahan_add(double* acc, double* comp, const double* t, int n) {
    for (int i = 0; i < n; ++i) {
        const double y = t[i] - comp[i];
        const double s = acc[i] + y;
        comp[i] = (s - acc[i]) - y;
        acc[i] = s;
    }
}

inline void plain_add(double* __restrict acc, const double* __restrict t, int n) {
    for (int i = 0; i < n; ++i) acc[i] += t[i];
}

// u = D^2 and t = w |y|^{-3-alpha} (grad f(x) - grad f(x-y)).y along one row.
void pair_terms(const double* __restrict f0, const double* __restrict fs, const double* __restrict gx0,
                const double* __restrict gxs, const double* __restrict gy0, const double* __restrict gys,
                double* __restrict u, double* __restrict t, int n, double inv_r2, double wk, double y1, double y2) {
    for (int i = 0; i < n; ++i) {
        const double d = f0[i] - fs[i];
        u[i] = d * d * inv_r2;
        t[i] = wk * ((gx0[i] - gxs[i]) * y1 + (gy0[i] - gys[i]) * y2);
    }
}

// Rows duplicated to length 2 nx so that shifted reads are contiguous:
// row(j)[i] holds the value at column i for i in [-nx/2, 3nx/2).
struct Extended {
    int nx, ny;
    std::vector<double> data;
    Extended(const ScalarField& f) : nx(f.grid.nx), ny(f.grid.ny), data(static_cast<std::size_t>(2 * nx) * ny) {
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < 2 * nx; ++k) data[static_cast<std::size_t>(j) * 2 * nx + k] = f.at(wrap(k - nx / 2, nx), j);
    }
    const double* row(int j) const { return data.data() + static_cast<std::size_t>(j) * 2 * nx + nx / 2; }
};

// sum over punctured cell offsets y of w (grad f(x) - grad f(x-y)).y |y|^{-3-alpha} phi(D^2),
// using the pair symmetry c(x, y) = c(x - y, -y).
ScalarField pair_sum(const ScalarField& f, const std::array<ScalarField, 2>& grad, double alpha,
                     const Nonlinearity& phi) {
    const GridSpec& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    const std::size_t N = g.size();
    require(nx <= kMaxRow, "grid rows longer than 4096 points are not supported");
    const Extended ef(f), egx(grad[0]), egy(grad[1]);
    const std::vector<Offset> offs = half_offsets(g);
    // A fixed chunking of the offsets, independent of the thread count, keeps results bit-identical.
    const int nchunks = std::max(1, std::min<int>(kChunks, static_cast<int>(offs.size())));
    const int nthreads = std::max(1, std::min(g_threads.load(), nchunks));
    std::vector<std::vector<double>> acc(nchunks, std::vector<double>(N, 0.0)), comp = acc;
    // Offsets are processed radially outward in fixed blocks, so the summation order is fixed.
    const double expo = -0.5 * (3.0 + alpha);
    const auto [fmin, fmax] = std::minmax_element(f.values.begin(), f.values.end());
    const double osc2 = (*fmax - *fmin) * (*fmax - *fmin);
    const double slope2 = kSlopeMargin * std::pow(sup_norms(f).grad_linf, 2);

    auto chunk = [&](int c, std::vector<double>& block) {
        const std::size_t lo = offs.size() * c / nchunks, hi = offs.size() * (c + 1) / nchunks;
        std::vector<double> u(nx), t(nx);
        double* A = acc[c].data();
        double* Cm = comp[c].data();
        double* B = block.data();
        for (std::size_t oi = lo; oi < hi; ++oi) {
            const Offset& o = offs[oi];
            const double inv_r2 = 1.0 / o.r2, y1 = o.y1, y2 = o.y2;
            const double wk = o.w * std::pow(o.r2, expo);
            const int sh = wrap(-o.p, nx);
            // |f(x) - f(x-y)| <= min(osc, slope |y|) bounds u = D^2 without a reduction.
            const double umax = std::min(osc2 * inv_r2, slope2);
            for (int j = 0; j < ny; ++j) {
                const int js = wrap(j - o.q, ny);
                const double* f0 = ef.row(j);
                const double* fs = ef.row(js) - o.p;
                const double* gx0 = egx.row(j);
                const double* gxs = egx.row(js) - o.p;
                const double* gy0 = egy.row(j);
                const double* gys = egy.row(js) - o.p;
                pair_terms(f0, fs, gx0, gxs, gy0, gys, u.data(), t.data(), nx, inv_r2, wk, y1, y2);
                phi.apply(u.data(), t.data(), nx, umax);
                const std::size_t rj = static_cast<std::size_t>(j) * nx, rs = static_cast<std::size_t>(js) * nx;
                plain_add(B + rj, t.data(), nx);
                plain_add(B + rs + sh, t.data(), nx - sh);
                plain_add(B + rs, t.data() + (nx - sh), sh);
            }
            if ((oi - lo + 1) % kBlockOffsets == 0 || oi + 1 == hi) {
                kahan_add(A, Cm, B, static_cast<int>(N));
                std::fill(block.begin(), block.end(), 0.0);
            }
        }
    };
    auto work = [&](int tid) {
        std::vector<double> block(N, 0.0);
        for (int c = tid; c < nchunks; c += nthreads) chunk(c, block);
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int tid = 0; tid < nthreads; ++tid) pool.emplace_back(work, tid);
        for (auto& th : pool) th.join();
    }
    ScalarField out(g);
    for (std::size_t k = 0; k < N; ++k) {
        double s = 0.0;
        for (int c = 0; c < nchunks; ++c) s += acc[c][k] - comp[c][k];
        out.values[k] = s;
    }
    return out;
}

// Lattice-vs-integral gap of the leading singular term yhat^T H yhat phi((g.yhat)^2) |y|^{-1-alpha}.
void add_singular_correction(ScalarField& out, const std::array<ScalarField, 2>& grad, const Hessian& H,
                             const Nonlinearity& phi, const AngularRule& rule) {
    const std::size_t N = out.values.size();
    const std::size_t n = rule.v.size();
    for (std::size_t k = 0; k < N; ++k) {
        const double g1 = grad[0].values[k], g2 = grad[1].values[k];
        const double hxx = H.xx.values[k], hxy = H.xy.values[k], hyy = H.yy.values[k];
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double c = rule.c[m], sn = rule.s[m];
            const double q = c * c * hxx + 2.0 * c * sn * hxy + sn * sn * hyy;
            const double z = g1 * c + g2 * sn;
            s += rule.v[m] * q * phi(z * z);
        }
        out.values[k] += s;
    }
}

// -sum_y w grad f(x - y).W(y) as a circular convolution.
void add_images(ScalarField& out, const std::array<ScalarField, 2>& grad, const ImageKernel& img) {
    SpectralField G1 = forward(grad[0]);
    const SpectralField G2 = forward(grad[1]);
    for (std::size_t k = 0; k < G1.coeffs.size(); ++k)
        G1.coeffs[k] = -(G1.coeffs[k] * img.w1.coeffs[k] + G2.coeffs[k] * img.w2.coeffs[k]);
    const ScalarField conv = inverse(G1);
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += conv.values[k];
}

bool is_constant(const ScalarField& f) {
    return std::all_of(f.values.begin(), f.values.end(), [&](double v) { return v == f.values.front(); });
}

// kappa * (punctured lattice sum + singular correction) for the given nonlinearity.
ScalarField contour_quadrature(const ScalarField& f, double alpha, const Nonlinearity& phi, double rb, int n_theta) {
    const auto grad = gradient(f);
    const Hessian H = hessian(f);
    ScalarField out = pair_sum(f, grad, alpha, phi);
    add_singular_correction(out, grad, H, phi, *angular_rule(f.grid, alpha, rb, n_theta));
    if (phi.shape == Shape::Direct) add_images(out, grad, *image_kernel(f.grid, alpha));
    // The continuous operator has zero mean; the quadrature's mean is pure discretization error.
    double mean = 0.0, c = 0.0;
    for (double v : out.values) {
        const double y = v - c, t = mean + y;
        c = (t - mean) - y;
        mean = t;
    }
    mean /= static_cast<double>(out.values.size());
    const double kappa = contour_prefactor(alpha);
    for (double& v : out.values) v = kappa * (v - mean);
    return out;
}

ScalarField remainder_quadrature(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m) {
    f.grid.validate();
    f.require_finite();
    validate(m);
    if (is_constant(f)) return ScalarField(f.grid);
    const double rb = window_radius(f.grid, std::max(f.grid.nx, f.grid.ny));
    if (const auto* s = std::get_if<SplitSpectral>(&m))
        return contour_quadrature(f, alpha.alpha(), Nonlinearity(Shape::Remainder, alpha.alpha()), rb,
                                  kAngularSplit * s->quad_refinement);
    if (const auto* s = std::get_if<SeriesTruncated>(&m)) {
        const double slope = sup_norms(f).grad_linf;
        if (!(slope < 1.0)) throw NumericalError("rhs_series: gradient sup norm >= 1, series diverges");
        return contour_quadrature(f, alpha.alpha(), Nonlinearity(Shape::Series, alpha.alpha(), s->n_max), rb,
                                  kAngularFull);
    }
    throw InvalidArgument("nonlinear remainder requires the split or series method");
}

}  // namespace

void validate(const RhsMethod& m) {
    if (const auto* d = std::get_if<DirectQuadrature>(&m)) require(d->cutoff_cells >= 1, "cutoff_cells must be >= 1");
    if (const auto* s = std::get_if<SplitSpectral>(&m)) require(s->quad_refinement >= 1, "quad_refinement must be >= 1");
    if (const auto* s = std::get_if<SeriesTruncated>(&m)) require(s->n_max >= 1, "n_max must be >= 1");
}

std::string method_name(const RhsMethod& m) {
    switch (m.index()) {
        case 0: return "direct";
        case 1: return "split";
        default: return "series";
    }
}

double contour_prefactor(double alpha) {
    const double s = 1.0 + alpha;
    const double c2s = std::pow(2.0, s) * std::tgamma(1.0 + 0.5 * s) / (kPi * std::abs(std::tgamma(-0.5 * s)));
    return c2s / s;
}

ScalarField rhs_direct(const ScalarField& f, const AlphaParams& alpha, int cutoff_cells) {
    f.grid.validate();
    f.require_finite();
    require(cutoff_cells >= 1, "cutoff_cells must be >= 1");
    if (is_constant(f)) return ScalarField(f.grid);
    return contour_quadrature(f, alpha.alpha(), Nonlinearity(Shape::Direct, alpha.alpha()),
                              window_radius(f.grid, cutoff_cells), kAngularFull);
}

ScalarField nonlinear_remainder(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m) {
    return remainder_quadrature(f, alpha, m);
}

ScalarField rhs_split(const ScalarField& f, const AlphaParams& alpha, int quad_refinement) {
    ScalarField out = fractional_laplacian(f, alpha.order());
    const ScalarField n = remainder_quadrature(f, alpha, SplitSpectral{quad_refinement});
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = -out.values[k] - n.values[k];
    return out;
}

ScalarField rhs_series(const ScalarField& f, const AlphaParams& alpha, int n_max) {
    ScalarField out = fractional_laplacian(f, alpha.order());
    const ScalarField n = remainder_quadrature(f, alpha, SeriesTruncated{n_max});
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = -out.values[k] - n.values[k];
    return out;
}

ScalarField evaluate_rhs(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m) {
    validate(m);
    switch (m.index()) {
        case 0: return rhs_direct(f, alpha, std::get<DirectQuadrature>(m).cutoff_cells);
        case 1: return rhs_split(f, alpha, std::get<SplitSpectral>(m).quad_refinement);
        default: return rhs_series(f, alpha, std::get<SeriesTruncated>(m).n_max);
    }
}

ScalarField nonlinear_part(const ScalarField& f, const AlphaParams& alpha, const RhsMethod& m) {
    if (std::holds_alternative<DirectQuadrature>(m)) {
        ScalarField out = rhs_direct(f, alpha, std::get<DirectQuadrature>(m).cutoff_cells);
        const ScalarField lin = fractional_laplacian(f, alpha.order());
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += lin.values[k];
        return out;
    }
    ScalarField n = remainder_quadrature(f, alpha, m);
    for (double& v : n.values) v = -v;
    return n;
}

double c_alpha_factor(double alpha, double d, double g) {
    return 1.0 + alpha + (3.0 + alpha) / (1.0 + d * d) * (d * g - d * d);
}

namespace {

// int over the plane outside the cell [-lx/2,lx/2]x[-ly/2,ly/2] of (r^2 + a^2)^{-beta}.
double exterior_integral(const GridSpec& g, double a, double beta) {
    const double hx = 0.5 * g.lx, hy = 0.5 * g.ly;
    const double corner = std::atan2(hy, hx);
    auto radial = [&](double th) {
        const double c = std::abs(std::cos(th)), s = std::abs(std::sin(th));
        const double r0 = std::min(c > 0.0 ? hx / c : std::numeric_limits<double>::infinity(),
                                   s > 0.0 ? hy / s : std::numeric_limits<double>::infinity());
        return std::pow(r0 * r0 + a * a, 1.0 - beta) / (2.0 * (beta - 1.0));
    };
    // Four symmetric quadrants, each split at the corner direction.
    return 4.0 * (GL::integrate(radial, 0.0, corner) + GL::integrate(radial, corner, 0.5 * kPi));
}

// d3 at x* with f shifted so that x* sits on grid index (0,0).
double d3_integral(const ScalarField& fs, const PointJet& J, double alpha, double rb) {
    const GridSpec& g = fs.grid;
    const double beta = 0.5 * (3.0 + alpha);
    const double fstar = fs.values[0];
    double sum = 0.0, comp = 0.0;
    for (const Offset& o : cell_offsets(g)) {
        const double d = fstar - fs.at(wrap(-o.p, g.nx), wrap(-o.q, g.ny));
        const double term = o.w * d * std::pow(o.r2 + d * d, -beta) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    const AngularRule& rule = *angular_rule(g, alpha, rb, kAngularFull);
    double corr = 0.0;
    for (std::size_t m = 0; m < rule.v.size(); ++m) {
        const double c = rule.c[m], s = rule.s[m];
        const double q = c * c * J.fxx + 2.0 * c * s * J.fxy + s * s * J.fyy;
        const double z = J.fx * c + J.fy * s;
        const double w = 1.0 + z * z;
        corr += rule.v[m] * std::pow(w, -beta) * (-0.5 * q + beta * z * z * q / w);
    }
    return sum + corr + fstar * exterior_integral(g, std::abs(fstar), beta);
}

void c_alpha_scan(const ScalarField& h, const std::array<ScalarField, 2>& grad, int i0, int j0,
                  const std::vector<Offset>& offs, double alpha, double& cmin) {
    const GridSpec& g = h.grid;
    const double fx = h.at(i0, j0), g1 = grad[0].at(i0, j0), g2 = grad[1].at(i0, j0);
    for (const Offset& o : offs) {
        const double r = std::sqrt(o.r2);
        const double d = (fx - h.at(wrap(i0 - o.p, g.nx), wrap(j0 - o.q, g.ny))) / r;
        const double gy = (g1 * o.y1 + g2 * o.y2) / r;
        cmin = std::min(cmin, c_alpha_factor(alpha, d, gy));
    }
}

constexpr int kCAlphaSamplesPerAxis = 8;

}  // namespace

KernelMonitors monitors(const ScalarField& f, const InitialNorms& f0, const AlphaParams& alpha) {
    f.grid.validate();
    f.require_finite();
    const GridSpec& g = f.grid;
    const double a = alpha.alpha(), beta = alpha.beta();
    KernelMonitors km;
    const SupNorms n = sup_norms(f);
    km.dyf_sup = n.grad_linf;
    km.c_alpha_min = 1.0 + a;
    const double base = 1.0 + 2.0 * f0.l1 / kPi + 4.0 * f0.linf * f0.linf * f0.linf;
    if (is_constant(f)) {
        km.d3_lower_bound = 0.5 * kPi * std::pow(std::abs(f.values.front()), beta) / std::pow(base, beta);
        return km;
    }
    const SpectralField F = forward(f);
    const PeakLocation top = argmax(f);
    const double fmax = std::max(top.value, *std::max_element(f.values.begin(), f.values.end()));
    km.d3_lower_bound = 0.5 * kPi * std::pow(std::max(fmax, 0.0), beta) / std::pow(base, beta);
    const ScalarField fs = translate(f, top.x, top.y);
    km.d3_value = d3_integral(fs, evaluate_jet(F, top.x, top.y), a, window_radius(g, std::max(g.nx, g.ny)));

    const std::vector<Offset> offs = cell_offsets(g);
    const PeakLocation gp = grad_argmax(f);
    const ScalarField fg = translate(f, gp.x, gp.y);
    c_alpha_scan(fg, gradient(fg), 0, 0, offs, a, km.c_alpha_min);
    const auto grad = gradient(f);
    const int sx = std::max(1, g.nx / kCAlphaSamplesPerAxis), sy = std::max(1, g.ny / kCAlphaSamplesPerAxis);
    for (int j = 0; j < g.ny; j += sy)
        for (int i = 0; i < g.nx; i += sx) c_alpha_scan(f, grad, i, j, offs, a, km.c_alpha_min);
    return km;
}

void set_kernel_threads(int n) { g_threads.store(std::max(1, n)); }

int kernel_threads() { return g_threads.load(); }

}  // namespace muskat
