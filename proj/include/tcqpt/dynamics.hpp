#pragma once

// Time integration of the mean-field flow with an adaptive Runge-Kutta-Fehlberg
// 7(8) stepper.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"

namespace tcqpt {

struct Trajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
    bool converged = false;
    double final_residual = 0.0;     // flow norm at the last state
    bool conservative_warning = false;  // rate-free input: no relaxation expected
};

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double flow_tolerance = 1e-10;
    int converge_steps = 3;       // consecutive accepted steps below flow_tolerance
    bool stop_on_convergence = true;
    bool record = true;           // keep every accepted step, otherwise only the ends
    double initial_step = 1e-3;
    double max_step = 0.0;        // <= 0: 0.25 / frequency_scale()
    long max_steps = 50'000'000;
};

/// Upper bound on the magnitude of the flow Jacobian's spectrum.
inline double frequency_scale(const ModelParams& p) {
    return std::abs(p.delta_c) + std::abs(p.delta_s) + 2.0 * p.lambda + std::abs(p.kappa()) + p.gamma_perp + p.gamma_par +
           2.0 * std::abs(p.omega_j) + 1e-300;
}

inline Trajectory integrate(const ModelParams& p, const MeanFieldState& initial, double horizon, const IntegrateOptions& o = {}) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 5>;
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("integrate: horizon must be positive");
    State x = initial.to_array();
    for (double v : x)
        if (!std::isfinite(v)) throw InputError("integrate: initial state must be finite");

    auto rhs = [&p](const State& y, State& dy, double) { dy = flow(p, MeanFieldState::from_array(y)); };
    auto stepper = ode::make_controlled(o.atol, o.rtol, ode::runge_kutta_fehlberg78<State>());

    Trajectory tr;
    tr.conservative_warning = rate_free(p);
    // Without a cap the controller parks the step on the edge of the explicit
    // stability region near a fixed point, where the flow norm floors near rtol,
    // and conserved quantities drift by many tolerances over long horizons.
    const double dt_max = o.max_step > 0.0 ? o.max_step : 0.25 / frequency_scale(p);
    double t = 0.0, dt = std::min({o.initial_step, horizon, dt_max});
    tr.times.push_back(t);
    tr.states.push_back(initial);
    int quiet = flow_norm(p, initial) < o.flow_tolerance ? 1 : 0;
    long steps = 0;
    while (t < horizon) {
        if (o.stop_on_convergence && quiet >= o.converge_steps) {
            tr.converged = true;
            break;
        }
        if (++steps > o.max_steps) break;
        dt = std::min({dt, horizon - t, dt_max});
        const double t_before = t;
        if (stepper.try_step(rhs, x, t, dt) == ode::fail) {
            if (dt < 1e-14 * std::max(1.0, std::abs(t)))
                throw StiffnessError("step size underflow; tighten tolerances or use an implicit method", t, dt);
            continue;
        }
        if (!(t > t_before)) throw StiffnessError("integration stalled", t, dt);
        const MeanFieldState s = MeanFieldState::from_array(x);
        quiet = flow_norm(p, s) < o.flow_tolerance ? quiet + 1 : 0;
        if (o.record) {
            tr.times.push_back(t);
            tr.states.push_back(s);
        }
    }
    if (tr.times.back() != t) {
        tr.times.push_back(t);
        tr.states.push_back(MeanFieldState::from_array(x));
    }
    if (o.stop_on_convergence && quiet >= o.converge_steps) tr.converged = true;
    tr.final_residual = flow_norm(p, tr.states.back());
    return tr;
}

struct SettleOptions {
    double first_horizon = 50.0;
    IntegrateOptions integrate{};
    NewtonOptions newton{};
    double polish_distance = 1e-6;  // allowed move of the polishing Newton step
};

/// Integrates over doubling horizons until the flow settles, then polishes
/// the endpoint with Newton and classifies it.
inline SteadySolution settle(const ModelParams& p, const MeanFieldState& initial, double max_horizon, const SettleOptions& o = {}) {
    if (rate_free(p)) throw InputError("settle: needs a dissipative model (some rate > 0)");
    if (!(max_horizon > 0.0)) throw InputError("settle: max_horizon must be positive");
    IntegrateOptions io = o.integrate;
    io.record = false;
    io.stop_on_convergence = true;

    MeanFieldState s = initial;
    double elapsed = 0.0, chunk = std::min(o.first_horizon, max_horizon);
    while (true) {
        const Trajectory tr = integrate(p, s, chunk, io);
        s = tr.states.back();
        elapsed += tr.times.back();
        if (tr.converged) break;
        if (elapsed >= max_horizon)
            throw NoRootError("settle: no convergence within the horizon", std::vector<double>{s.a_mean.real(), s.a_mean.imag(), s.jm.real(), s.jm.imag(), s.jz},
                              tr.final_residual);
        chunk = std::min(2.0 * chunk, max_horizon - elapsed);
    }
    const SteadySolution sol = solve_from(p, s, o.newton);
    // The gauge fix may rotate the reported phase; compare gauge-invariant data.
    if (std::abs(sol.state.jz - s.jz) > o.polish_distance || std::abs(std::abs(sol.state.jm) - std::abs(s.jm)) > o.polish_distance)
        throw NoRootError("settle: polishing moved away from the relaxed state", {s.jm.real(), s.jm.imag(), s.jz}, flow_norm(p, s));
    return sol;
}

}  // namespace tcqpt
