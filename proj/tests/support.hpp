#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tcqpt/tcqpt.hpp"

namespace tcqpt::testing {

/// lambda = 8, omega_a = 1, Delta_s = Delta_c = lambda / ratio.
inline ModelParams fig2(double ratio, Regime regime) {
    ModelParams p = figure_base(regime != Regime::hermitian);
    p.delta_c = p.delta_s = p.lambda / ratio;
    return apply_regime(p, regime);
}

/// Lossy cavity without gain at Delta_c = x lambda and drive ratio
/// factor * (Delta_c - i kappa_c) / lambda.
inline ModelParams lossy_window(double x, double factor) {
    ModelParams p = figure_base(true);
    p.delta_c = p.delta_s = x * p.lambda;
    return apply_regime(p, Regime::lossy, factor);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    cplx complex(double r) { return std::polar(uniform(0.0, r), uniform(0.0, 6.283185307179586)); }
    MeanFieldState state() { return {complex(2.0), complex(1.0), uniform(-1.0, 1.0)}; }

    ModelParams dissipative() {
        ModelParams p;
        p.delta_c = uniform(2.0, 10.0);
        p.delta_s = uniform(2.0, 10.0);
        p.lambda = uniform(1.0, 16.0);
        p.omega_a = complex(2.0);
        p.omega_j = complex(2.0);
        p.kappa_c = uniform(0.2, 2.0);
        p.kappa_g = uniform(0.0, 2.0);
        p.gamma_perp = uniform(0.1, 2.0);
        // gamma_par <= 2 gamma_perp keeps the Bloch ball invariant.
        p.gamma_par = uniform(0.05, 1.9) * p.gamma_perp;
        return p;
    }

private:
    std::mt19937_64 gen_;
};

/// Central-difference Jacobian of a vector field R^n -> R^m.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double h = 1e-6) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd j(f0.size(), x.size());
    for (int c = 0; c < x.size(); ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        j.col(c) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return j;
}

/// Physical roots of the mean-field system with a nonzero residual drive,
/// by brute force on the scalar condition obtained after eliminating a and m:
///
///   4 gamma_perp |D|^2 z + gamma_par (1 + z) |A(z)|^2 = 0,
///   A(z) = Delta_s - i gamma_perp - 2 z E,  m = 2 z D / A(z),
///
/// scanned for sign changes on z in [-1, 0] and refined by bisection.
inline std::vector<MeanFieldState> cubic_oracle_roots(const ModelParams& p, int scan = 20000) {
    const cplx e = -0.5 * p.lambda * p.lambda / cplx(p.delta_c, -p.kappa());
    const cplx d = p.omega_j + p.lambda * (-p.omega_a / cplx(p.delta_c, -p.kappa()));
    const cplx a0(p.delta_s, -p.gamma_perp);
    auto g = [&](double z) { return 4.0 * p.gamma_perp * std::norm(d) * z + p.gamma_par * (1.0 + z) * std::norm(a0 - 2.0 * z * e); };
    std::vector<MeanFieldState> out;
    double z0 = -1.0, g0 = g(z0);
    for (int i = 1; i <= scan; ++i) {
        const double z1 = -1.0 + double(i) / scan, g1 = g(z1);
        if (g0 == 0.0 || g0 * g1 < 0.0) {
            double lo = z0, hi = z1;
            for (int k = 0; k < 200 && hi - lo > 1e-16; ++k) {
                const double mid = 0.5 * (lo + hi);
                (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
            }
            const double z = 0.5 * (lo + hi);
            const cplx m = 2.0 * z * d / (a0 - 2.0 * z * e);
            const MeanFieldState s{-(0.5 * p.lambda * m + p.omega_a) / cplx(p.delta_c, -p.kappa()), m, z};
            if (spin_length(s) <= 1.0 + 1e-9) out.push_back(s);
        }
        z0 = z1, g0 = g1;
    }
    return out;
}

inline double max_abs_diff(const MeanFieldState& a, const MeanFieldState& b) {
    const auto x = a.to_array(), y = b.to_array();
    double d = 0.0;
    for (int i = 0; i < 5; ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

inline MeanFieldState state_of(const OrderParameters& o) { return {o.a_mean, o.jm, o.jz}; }

}  // namespace tcqpt::testing
