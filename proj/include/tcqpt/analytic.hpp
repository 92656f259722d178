#pragma once

// Closed-form order parameters of the matched model, in the Hermitian case and
// with the cavity gain set to the balance rate, plus power-law fitting of
// critical behavior.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"

namespace tcqpt {

/// Scaled order parameters. jz = <Jz>/(N/2), jm = <J->/(N/2),
/// a_mean = <a>/sqrt(N), n_phot = <a^dag a>/N, f_quantity = |jm|^2 + jz^2.
struct OrderParameters {
    double jz = -1.0;
    cplx jm{};
    cplx a_mean{};
    double n_phot = 0.0;
    double f_quantity = 1.0;
};

/// Closed form of F on the superradiant gain-balanced branch:
///   (lc^2/l^2)(1 - lc^2/l^2)(gamma_par/gamma_perp) + lc^4/l^4.
inline double f_quantity_closed_form(double lambda_c, double lambda, double relaxation_ratio) {
    if (lambda < lambda_c) return 1.0;
    const double r = (lambda_c * lambda_c) / (lambda * lambda);
    return r * (1.0 - r) * relaxation_ratio + r * r;
}

inline OrderParameters hermitian_order(const ModelParams& p, double lambda) {
    const double lc = critical_coupling(p, Regime::hermitian);
    OrderParameters o;
    if (lambda >= lc && lambda > 0.0) {
        const double r = (lc * lc) / (lambda * lambda);
        o.jz = -r;
        o.jm = std::sqrt(std::max(0.0, 1.0 - r * r));
    }
    o.a_mean = -(0.5 * lambda * o.jm + p.omega_a) / p.delta_c;
    o.n_phot = std::norm(o.a_mean);
    o.f_quantity = std::norm(o.jm) + o.jz * o.jz;
    return o;
}

/// Gain-balanced branch (kappa_g at the balance rate, matched drives). Falls
/// back to the Hermitian result when gamma_perp = 0.
inline OrderParameters gain_balanced_order(const ModelParams& p, double lambda) {
    if (p.gamma_perp == 0.0) return hermitian_order(p, lambda);
    const double lc = critical_coupling(p, Regime::gain_balanced);
    const double q = p.gamma_par / p.gamma_perp;
    OrderParameters o;
    if (lambda >= lc && lambda > 0.0) {
        const double r = (lc * lc) / (lambda * lambda);
        o.jz = -r;
        o.jm = (lc / lambda) * std::sqrt(std::max(0.0, (1.0 - r) * q));
    }
    const cplx den = p.delta_c * cplx(1.0, p.gamma_perp / p.delta_s);
    o.a_mean = -(0.5 * lambda * o.jm + p.omega_a) / den;
    o.n_phot = std::norm(o.a_mean);
    o.f_quantity = f_quantity_closed_form(lc, lambda, q);
    return o;
}

inline OrderParameters closed_form_order(const ModelParams& p, double lambda, Regime regime) {
    switch (regime) {
        case Regime::hermitian: return hermitian_order(p, lambda);
        case Regime::gain_balanced: return gain_balanced_order(p, lambda);
        case Regime::lossy: break;
    }
    throw InputError("closed forms exist for the hermitian and gain_balanced regimes only");
}

inline double closed_form_critical_coupling(const ModelParams& p, Regime regime) {
    if (regime == Regime::gain_balanced && p.gamma_perp == 0.0) return critical_coupling(p, Regime::hermitian);
    return critical_coupling(p, regime);
}

/// n_phot(lambda) - n_phot(lambda_c) from the exact branch formulas; zero
/// below threshold.
inline double photon_number_variation(const ModelParams& p, double lambda, Regime regime) {
    const double lc = closed_form_critical_coupling(p, regime);
    if (lambda <= lc) return 0.0;
    return closed_form_order(p, lambda, regime).n_phot - closed_form_order(p, lc, regime).n_phot;
}

/// Leading amplitude A of delta_n ~ A (lambda - lambda_c)^(1/2) for a real
/// cavity drive.
inline double photon_variation_amplitude(const ModelParams& p, Regime regime) {
    const double oa = p.omega_a.real();
    const double lc = closed_form_critical_coupling(p, regime);
    if (regime == Regime::hermitian || p.gamma_perp == 0.0)
        return 2.0 * oa * std::sqrt(lc) / (p.delta_c * p.delta_c);
    const double g = p.gamma_perp / p.delta_s;
    return oa * std::sqrt(2.0 * lc * p.gamma_par / p.gamma_perp) / (p.delta_c * p.delta_c * (1.0 + g * g));
}

struct CriticalSample {
    double lambda;
    double value;
};

struct ExponentFit {
    double exponent = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    std::size_t used = 0;
};

/// Least-squares fit of log|obs - obs_c| against log(lambda - lambda_c).
/// Points closer than 1e-6 lambda_c to the threshold and points with zero
/// difference are dropped.
inline ExponentFit fit_critical_exponent(std::span<const CriticalSample> samples, double lambda_c, double value_at_critical) {
    if (samples.size() < 8) throw InputError("exponent fit needs at least 8 samples");
    std::vector<double> xs, ys;
    for (const auto& s : samples) {
        if (!(s.lambda > lambda_c)) throw InputError("exponent fit: sample at or below the critical coupling");
        const double dl = s.lambda - lambda_c;
        const double dv = std::abs(s.value - value_at_critical);
        if (dl < 1e-6 * lambda_c || dv == 0.0 || !std::isfinite(dv)) continue;
        xs.push_back(std::log(dl));
        ys.push_back(std::log(dv));
    }
    if (xs.size() < 4) throw InputError("exponent fit: fewer than 4 usable samples");

    const double n = double(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n, my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InputError("exponent fit: samples do not span lambda");
    ExponentFit fit;
    fit.exponent = sxy / sxx;
    fit.amplitude = std::exp(my - fit.exponent * mx);
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.used = xs.size();
    return fit;
}

}  // namespace tcqpt
