#pragma once

#include <functional>
#include <string>
#include <vector>

#include "muskat/field.hpp"
#include "muskat/kernel.hpp"

namespace muskat {

enum class TimeMethod { ETD_RK2, RK4_explicit };

std::string to_string(TimeMethod m);
TimeMethod time_method_from_string(const std::string& s);

struct StepperConfig {
    double dt_init = 0.05;
    double dt_max = 0.5;
    double t_end = 1.0;
    double safety = 0.9;
    double rtol = 1e-6;
    TimeMethod method = TimeMethod::ETD_RK2;
    RhsMethod rhs_method = SplitSpectral{};
    // Drop the nonlinear remainder (ETD path only): pure fractional heat flow.
    bool linear_only = false;

    void validate() const;
};

struct SimState {
    double t = 0.0;
    ScalarField f;
    long step_count = 0;
    double last_dt = 0.0;
    // Proposed size of the next step; 0 before the first step.
    double next_dt = 0.0;
};

// One accepted step; rejected attempts shrink dt and retry.
SimState step(const SimState& state, const StepperConfig& cfg, const AlphaParams& alpha);

struct RunHooks {
    // Called with the initial state and after every accepted step.
    std::function<void(const SimState&)> on_record;
    // Steps are shortened to land exactly on these times.
    std::vector<double> snapshot_times;
    std::function<void(const SimState&)> on_snapshot;
};

SimState run(const ScalarField& f0, const StepperConfig& cfg, const AlphaParams& alpha, const RunHooks& hooks = {});

// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2.
double phi1(double z);
double phi2(double z);

}  // namespace muskat
