#pragma once

#include <vector>

namespace muskat {

// a_n = Gamma((3+alpha)/2 + n) / (Gamma((3+alpha)/2) n!), by the product recurrence.
double taylor_coeff(int n, double alpha);

struct CoeffTable {
    double alpha = 0.0;
    std::vector<double> a;  // a[0] holds a_1

    CoeffTable(double alpha, int n_max);
    double operator()(int n) const { return a.at(static_cast<std::size_t>(n - 1)); }
    int n_max() const { return static_cast<int>(a.size()); }
};

// R(z) = 1 - (1+z^2)^{-(3+alpha)/2}.
double r_alpha(double z, double alpha);
// -sum_{n<=n_max} (-1)^n a_n z^{2n}.
double r_alpha_series(double z, double alpha, int n_max);

// sum_{n>=1} a_n (2n+1)^2 z^{2n} in closed form; |z| < 1.
double weighted_series(double z, double alpha);
double weighted_partial_sum(double z, double alpha, int n_terms);

// Gauss hypergeometric 2F1 on x <= 0.
double hyp2f1(double a, double b, double c, double x);

// g(z) = (3+alpha) z^3 (1+z^2)^{(3+alpha)/2} / 3 * 2F1(3/2, (5+alpha)/2; 5/2; -z^2).
double ode_solution_g(double z, double alpha);
// H(z) = g(z) / (1+z^2)^{(3+alpha)/2}.
double ode_solution_h(double z, double alpha);

// 2 int_0^inf sin(rS) / r^{1+alpha} dr.
double pv_exp_integral(double S, double alpha);
// int_0^inf sin(u) / u^{1+alpha} du by quadrature.
double sine_moment(double alpha);

}  // namespace muskat
