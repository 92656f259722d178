#pragma once

// Parameter space of the two-drive Tavis-Cummings model in the frame rotating
// at the common drive frequency.
//
// Amplitudes are stored in scaled form so that the mean-field layer does not
// depend on the ensemble size N:
//   omega_a = Omega_a / sqrt(N),  omega_j = Omega_J / sqrt(N) = Omega_s.
// Frequencies are plain numbers in a user-chosen common unit.

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

#include "tcqpt/error.hpp"

namespace tcqpt {

using cplx = std::complex<double>;

struct ModelParams {
    double delta_c = 0.0;     // cavity detuning omega_c - omega_d
    double delta_s = 0.0;     // ensemble detuning omega_s - omega_d
    double lambda = 0.0;      // collective coupling lambda_s * sqrt(N)
    double n_tls = 1.0;       // ensemble size, only the cumulant layer reads it
    cplx omega_a{};           // cavity drive / sqrt(N)
    cplx omega_j{};           // collective ensemble drive / sqrt(N)
    double kappa_c = 0.0;     // cavity loss
    double kappa_g = 0.0;     // cavity gain
    double gamma_perp = 0.0;  // transversal relaxation
    double gamma_par = 0.0;   // longitudinal relaxation

    // Optional provenance of the detunings and relaxation rates. When set they
    // must be consistent with the fields above (see validate()).
    std::optional<double> omega_c, omega_s, omega_d;
    std::optional<double> gamma_p, gamma_h;

    /// Net cavity damping; negative when the gain exceeds the loss.
    double kappa() const noexcept { return kappa_c - kappa_g; }

    bool operator==(const ModelParams&) const = default;
};

enum class Regime { hermitian, lossy, gain_balanced };

inline std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::hermitian: return "hermitian";
        case Regime::lossy: return "lossy";
        case Regime::gain_balanced: return "gain_balanced";
    }
    return "?";
}

inline Regime parse_regime(std::string_view s) {
    if (s == "hermitian") return Regime::hermitian;
    if (s == "lossy") return Regime::lossy;
    if (s == "gain_balanced") return Regime::gain_balanced;
    throw InputError("unknown regime '" + std::string(s) + "' (expected hermitian, lossy or gain_balanced)");
}

namespace detail {

inline bool close_rel(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

inline bool close_rel(cplx a, cplx b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InputError(std::string(name) + " must be finite");
}

}  // namespace detail

/// Relative tolerance used when cross-checking redundant inputs
/// (frequency triple against detunings, single-emitter rates against
/// ensemble rates).
inline constexpr double kConsistencyTol = 1e-12;

/// True when the spin length |m|^2 + z^2 is a constant of the mean-field flow.
inline bool spin_conserving(const ModelParams& p) noexcept {
    return p.gamma_perp == 0.0 && p.gamma_par == 0.0;
}

/// True when every dissipative rate vanishes.
inline bool rate_free(const ModelParams& p) noexcept {
    return spin_conserving(p) && p.kappa_c == 0.0 && p.kappa_g == 0.0;
}

/// Sets detunings from absolute cavity, ensemble and drive frequencies.
inline void set_frequencies(ModelParams& p, double omega_c, double omega_s, double omega_d) {
    p.omega_c = omega_c;
    p.omega_s = omega_s;
    p.omega_d = omega_d;
    p.delta_c = omega_c - omega_d;
    p.delta_s = omega_s - omega_d;
}

/// Sets the ensemble rates from single-emitter dephasing gamma_p and radiative
/// decay gamma_h: gamma_perp = gamma_h + 2 gamma_p, gamma_par = 2 gamma_h.
inline void set_emitter_rates(ModelParams& p, double gamma_p, double gamma_h) {
    p.gamma_p = gamma_p;
    p.gamma_h = gamma_h;
    p.gamma_perp = gamma_h + 2.0 * gamma_p;
    p.gamma_par = 2.0 * gamma_h;
}

inline void validate(const ModelParams& p) {
    using detail::require_finite;
    require_finite(p.delta_c, "delta_c");
    require_finite(p.delta_s, "delta_s");
    require_finite(p.lambda, "lambda");
    require_finite(p.kappa_c, "kappa_c");
    require_finite(p.kappa_g, "kappa_g");
    require_finite(p.gamma_perp, "gamma_perp");
    require_finite(p.gamma_par, "gamma_par");
    require_finite(p.omega_a.real(), "omega_a_re");
    require_finite(p.omega_a.imag(), "omega_a_im");
    require_finite(p.omega_j.real(), "omega_j_re");
    require_finite(p.omega_j.imag(), "omega_j_im");
    if (!(p.delta_c > 0.0)) throw InputError("delta_c must be > 0");
    if (!(p.delta_s > 0.0)) throw InputError("delta_s must be > 0");
    if (p.lambda < 0.0) throw InputError("lambda must be >= 0");
    if (!(p.n_tls >= 1.0) || std::floor(p.n_tls) != p.n_tls || !std::isfinite(p.n_tls))
        throw InputError("n_tls must be a positive integer");
    if (p.kappa_c < 0.0 || p.kappa_g < 0.0) throw InputError("kappa_c and kappa_g must be >= 0");
    if (p.gamma_perp < 0.0 || p.gamma_par < 0.0) throw InputError("gamma_perp and gamma_par must be >= 0");

    const int n_freq = int(p.omega_c.has_value()) + int(p.omega_s.has_value()) + int(p.omega_d.has_value());
    if (n_freq != 0 && n_freq != 3) throw InputError("omega_c, omega_s and omega_d must be given together");
    if (n_freq == 3) {
        if (!detail::close_rel(p.delta_c, *p.omega_c - *p.omega_d, kConsistencyTol) ||
            !detail::close_rel(p.delta_s, *p.omega_s - *p.omega_d, kConsistencyTol))
            throw InputError("detunings inconsistent with omega_c, omega_s, omega_d");
    }
    if (p.gamma_p || p.gamma_h) {
        const double gp = p.gamma_p.value_or(0.0);
        const double gh = p.gamma_h.value_or(0.0);
        if (gp < 0.0 || gh < 0.0) throw InputError("gamma_p and gamma_h must be >= 0");
        if (!detail::close_rel(p.gamma_perp, gh + 2.0 * gp, kConsistencyTol) ||
            !detail::close_rel(p.gamma_par, 2.0 * gh, kConsistencyTol))
            throw InputError("gamma_perp/gamma_par inconsistent with gamma_p/gamma_h");
    }
}

/// Drive ratio Omega_a / Omega_J at which the two drives cancel after the
/// displacement of the cavity field.
///   hermitian:      Delta_c / lambda
///   lossy:          (Delta_c - i kappa) / lambda, kappa = kappa_c - kappa_g
///   gain_balanced:  Delta_c (1 + i gamma_perp / Delta_s) / lambda
inline cplx matching_ratio(const ModelParams& p, Regime regime) {
    if (p.lambda == 0.0) throw InputError("degenerate coupling: lambda = 0 admits no matching ratio");
    switch (regime) {
        case Regime::hermitian: return cplx(p.delta_c / p.lambda, 0.0);
        case Regime::lossy: return cplx(p.delta_c, -p.kappa()) / p.lambda;
        case Regime::gain_balanced:
            if (p.delta_s == 0.0) throw InputError("delta_s = 0: gain-balanced ratio undefined");
            return p.delta_c * cplx(1.0, p.gamma_perp / p.delta_s) / p.lambda;
    }
    throw InputError("unknown regime");
}

/// Cavity gain that cancels Delta_c gamma_perp + Delta_s kappa.
inline double gain_balance_rate(const ModelParams& p) {
    if (p.delta_s == 0.0) throw InputError("delta_s = 0: gain balance rate undefined");
    return p.kappa_c + p.gamma_perp * p.delta_c / p.delta_s;
}

/// Critical collective coupling. The gain-balanced value
/// sqrt(Delta_c Delta_s (1 + gamma_perp^2 / Delta_s^2)) reduces to the
/// Hermitian sqrt(Delta_c Delta_s) when gamma_perp = 0. A lossy cavity
/// without gain has no transition.
inline double critical_coupling(const ModelParams& p, Regime regime) {
    if (!(p.delta_c > 0.0) || !(p.delta_s > 0.0)) throw InputError("critical coupling needs delta_c, delta_s > 0");
    switch (regime) {
        case Regime::hermitian: return std::sqrt(p.delta_s * p.delta_c);
        case Regime::gain_balanced: {
            const double g = p.gamma_perp / p.delta_s;
            return std::sqrt(p.delta_c * p.delta_s * (1.0 + g * g));
        }
        case Regime::lossy: throw InputError("no critical coupling in the lossy regime: only the trivial branch exists");
    }
    throw InputError("unknown regime");
}

/// Displaced-frame view of a parameter set.
struct EffectiveModel {
    cplx alpha;           // cavity displacement -omega_a / (Delta_c - i kappa)
    cplx residual_drive;  // omega_j + lambda * alpha, zero under lossy matching
    double lambda_crit;   // gain-balanced critical coupling (Hermitian one when gamma_perp = 0)
    double kappa_eff;     // kappa_c - kappa_g
    bool matched_hermitian = false;
    bool matched_lossy = false;
    bool matched_gain_balanced = false;
    bool gain_balanced = false;  // kappa_g equals the balance rate
};

/// omega_j + lambda * alpha with the dissipative displacement.
inline cplx residual_drive(const ModelParams& p) {
    const cplx alpha = -p.omega_a / cplx(p.delta_c, -p.kappa());
    return p.omega_j + p.lambda * alpha;
}

inline bool ratio_matches(const ModelParams& p, cplx ratio, double rel_tol) {
    return detail::close_rel(p.omega_a, ratio * p.omega_j, rel_tol);
}

inline EffectiveModel build_effective(const ModelParams& p, double rel_tol = 1e-12) {
    EffectiveModel e;
    e.kappa_eff = p.kappa();
    e.alpha = -p.omega_a / cplx(p.delta_c, -e.kappa_eff);
    e.residual_drive = p.omega_j + p.lambda * e.alpha;
    e.lambda_crit = critical_coupling(p, Regime::gain_balanced);
    if (p.lambda > 0.0) {
        e.matched_hermitian = ratio_matches(p, matching_ratio(p, Regime::hermitian), rel_tol);
        e.matched_lossy = ratio_matches(p, matching_ratio(p, Regime::lossy), rel_tol);
        e.matched_gain_balanced = ratio_matches(p, matching_ratio(p, Regime::gain_balanced), rel_tol);
    }
    e.gain_balanced = detail::close_rel(p.kappa_g, gain_balance_rate(p), rel_tol);
    return e;
}

/// Imposes a regime on a parameter set: for gain_balanced the gain is set to
/// gain_factor * gain_balance_rate(); then omega_j is chosen so that
/// omega_a / omega_j = drive_factor * matching_ratio(regime).
inline ModelParams apply_regime(ModelParams p, Regime regime, double drive_factor = 1.0, double gain_factor = 1.0) {
    if (!(drive_factor > 0.0) || !std::isfinite(drive_factor)) throw InputError("drive factor must be > 0");
    if (regime == Regime::gain_balanced) {
        if (!(gain_factor >= 0.0) || !std::isfinite(gain_factor)) throw InputError("gain factor must be >= 0");
        p.kappa_g = gain_factor * gain_balance_rate(p);
    }
    const cplx ratio = drive_factor * matching_ratio(p, regime);
    p.omega_j = p.omega_a / ratio;
    return p;
}

}  // namespace tcqpt
