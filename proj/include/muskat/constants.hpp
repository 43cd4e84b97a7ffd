#pragma once

#include <optional>
#include <string>

namespace muskat {

// PV bound constant: pi at alpha = 0, else 6/(1-alpha).
double c_alpha(double alpha);

// Root in (0,1) of 2 c_alpha(alpha) weighted_series(z, alpha) = 1; alpha in [0, 1/2).
double k0_of_alpha(double alpha);

// 1 - 2 c_alpha(alpha) weighted_series(f1_norm, alpha).
double mu_of(double alpha, double f1_norm);

// sqrt((1+alpha-eps)/(5+alpha+eps)).
double grad_threshold(double alpha, double eps);

struct DecayConstants {
    double c_tilde = 0.0;
    double c_decay = 0.0;
};
DecayConstants decay_constants(double alpha, double linf0, double l1_0);

// Gradient envelope constant from the proof's lower bound on the dissipation term:
// K = eps / (2 [1 + 2 m_t/pi + 4 linf0^2 grad0]^{(3+alpha)/2}),
// c_sharp = K (1+alpha)/4 grad0^{(1+alpha)/2}.
double c_sharp(double alpha, double eps, double linf0, double grad0, double m_t);

struct ConstantsReport {
    double alpha = 0.0;
    double c_alpha = 0.0;
    std::optional<double> k0;
    std::optional<double> mu;
    std::optional<double> grad_threshold;
    std::optional<DecayConstants> decay;
    std::string k0_error;
    std::string c_sharp_note;
};

struct DataNorms {
    std::optional<double> f1_norm;
    std::optional<double> linf;
    std::optional<double> l1;
    std::optional<double> eps;
};

// Every constant that is defined for the inputs; k0 failures are reported, not thrown.
ConstantsReport constants_report(double alpha, const DataNorms& norms = {});

}  // namespace muskat
