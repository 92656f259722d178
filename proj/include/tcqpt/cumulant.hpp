#pragma once

// Second-order cumulant steady state: the mean-field unknowns plus the two
// correlators C = <Jz a> and P = <a J+>, scaled as
//   C = <Jz a> / ((N/2) sqrt(N)),  P = <a J+> / (sqrt(N) (N/2)),
// with <a^dag J-> = conj(P). Higher products are factorized. In these
// variables the system is free of N:
//
//   (Delta_c - i kappa) a + (lambda/2) m + omega_a                       = 0
//   (Delta_s - i gamma_perp) m - 2 lambda C - 2 z omega_j                 = 0
//   2 lambda Im P + 2 Im(omega_j conj(m)) - gamma_par (1 + z)             = 0
//   (Delta_c - i(kappa + gamma_par)) C - i gamma_par a
//     + lambda (z m / 2 - conj(P) a + P a) + omega_j P
//     - conj(omega_j) a m + omega_a z                                     = 0
//   ((Delta_c - Delta_s) - i(kappa + gamma_perp)) P + lambda |m|^2 / 2
//     + 2 lambda C conj(a) + omega_a conj(m) + 2 conj(omega_j) C          = 0

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"

namespace tcqpt {

struct CumulantState {
    MeanFieldState base;
    cplx c_za{};
    cplx c_ap{};

    std::array<double, 9> to_array() const {
        const auto b = base.to_array();
        return {b[0], b[1], b[2], b[3], b[4], c_za.real(), c_za.imag(), c_ap.real(), c_ap.imag()};
    }
    static CumulantState from_array(const std::array<double, 9>& v) {
        return {MeanFieldState::from_array({v[0], v[1], v[2], v[3], v[4]}), {v[5], v[6]}, {v[7], v[8]}};
    }
};

/// Correlators replaced by products of the mean values.
inline CumulantState factorized_lift(const MeanFieldState& s) {
    return {s, s.jz * s.a_mean, s.a_mean * std::conj(s.jm)};
}

inline std::array<double, 9> cumulant_residual(const ModelParams& p, const CumulantState& st) {
    const cplx I(0.0, 1.0);
    const cplx a = st.base.a_mean, m = st.base.jm, c = st.c_za, q = st.c_ap;
    const double z = st.base.jz, l = p.lambda, k = p.kappa();
    const cplx oa = p.omega_a, oj = p.omega_j;

    const cplx r1 = cplx(p.delta_c, -k) * a + (0.5 * l) * m + oa;
    const cplx r2 = cplx(p.delta_s, -p.gamma_perp) * m - 2.0 * l * c - 2.0 * z * oj;
    const double r3 = 2.0 * l * q.imag() + 2.0 * std::imag(oj * std::conj(m)) - p.gamma_par * (1.0 + z);
    const cplx r4 = cplx(p.delta_c, -(k + p.gamma_par)) * c - I * p.gamma_par * a +
                    l * (0.5 * z * m - std::conj(q) * a + q * a) + oj * q - std::conj(oj) * a * m + oa * z;
    const cplx r5 = cplx(p.delta_c - p.delta_s, -(k + p.gamma_perp)) * q + 0.5 * l * std::norm(m) +
                    2.0 * l * c * std::conj(a) + oa * std::conj(m) + 2.0 * std::conj(oj) * c;
    return {r1.real(), r1.imag(), r2.real(), r2.imag(), r3, r4.real(), r4.imag(), r5.real(), r5.imag()};
}

inline double cumulant_residual_norm(const ModelParams& p, const CumulantState& st) {
    double n = 0.0;
    for (double v : cumulant_residual(p, st)) n += v * v;
    return std::sqrt(n);
}

struct CumulantOptions {
    double tolerance = 1e-10;
    int max_iterations = 200;
};

struct CumulantSolution {
    CumulantState state;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Damped Newton with a central-difference Jacobian and a minimum-norm
/// linear solve.
inline CumulantSolution solve_cumulant(const ModelParams& p, const CumulantState& initial, const CumulantOptions& o = {}) {
    using Vec = Eigen::Matrix<double, 9, 1>;
    using Mat = Eigen::Matrix<double, 9, 9>;
    auto eval = [&](const Vec& x) {
        std::array<double, 9> a;
        for (int i = 0; i < 9; ++i) a[i] = x[i];
        const auto r = cumulant_residual(p, CumulantState::from_array(a));
        return Vec(Eigen::Map<const Vec>(r.data()));
    };
    auto to_state = [](const Vec& x) {
        std::array<double, 9> a;
        for (int i = 0; i < 9; ++i) a[i] = x[i];
        return CumulantState::from_array(a);
    };

    const auto init = initial.to_array();
    Vec x = Eigen::Map<const Vec>(init.data());
    if (!x.allFinite()) throw InputError("initial cumulant state must be finite");
    Vec r = eval(x);
    for (int it = 0; it <= o.max_iterations; ++it) {
        const double nr = r.norm();
        if (nr < o.tolerance) return {to_state(x), nr, it};
        if (it == o.max_iterations) break;
        Mat j;
        for (int c = 0; c < 9; ++c) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[c]));
            Vec xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            j.col(c) = (eval(xp) - eval(xm)) / (2.0 * h);
        }
        const Vec step = detail::lstsq<9, 9>(j, Vec(-r));
        double t = 1.0, best_t = 1.0, best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 11; ++k, t *= 0.5) {
            const double trial = eval(x + t * step).norm();
            if (trial < best) best = trial, best_t = t;
            if (trial <= (1.0 - 1e-4 * t) * nr) {
                best_t = t;
                break;
            }
        }
        x += best_t * step;
        if (!x.allFinite()) break;
        r = eval(x);
    }
    throw NoRootError("cumulant Newton iteration did not converge", std::vector<double>(x.data(), x.data() + 9), r.norm());
}

/// Starts from the factorized lift of a mean-field root.
inline CumulantSolution solve_cumulant(const ModelParams& p, const MeanFieldState& mean_field_root, const CumulantOptions& o = {}) {
    return solve_cumulant(p, factorized_lift(mean_field_root), o);
}

}  // namespace tcqpt
