#pragma once

// Mean-field steady states of the driven model with net cavity damping
// kappa = kappa_c - kappa_g.
//
// Scaled variables: a = <a>/sqrt(N), m = <J->/(N/2), z = <Jz>/(N/2). The
// equations of motion are
//
//   da/dt = -i (Delta_c - i kappa) a - i (lambda/2) m - i omega_a
//   dm/dt = -i (Delta_s - i gamma_perp) m + 2 i z (lambda a + omega_j)
//   dz/dt = 2 Im[(lambda a + omega_j) conj(m)] - gamma_par (1 + z)
//
// The cavity equation is linear in a, so roots are searched in the reduced
// unknowns (Re m, Im m, z) with a = -(lambda m / 2 + omega_a)/(Delta_c - i kappa).
// With that substitution the spin equation becomes
//
//   (Delta_s - i gamma_perp - 2 z E) m - 2 z D = 0,
//   E = -lambda^2 / (2 (Delta_c - i kappa)),  D = omega_j + lambda alpha,
//
// where D is the residual drive left after the displacement.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"

namespace tcqpt {

struct MeanFieldState {
    cplx a_mean{};
    cplx jm{};
    double jz = -1.0;

    std::array<double, 5> to_array() const { return {a_mean.real(), a_mean.imag(), jm.real(), jm.imag(), jz}; }
    static MeanFieldState from_array(const std::array<double, 5>& v) { return {{v[0], v[1]}, {v[2], v[3]}, v[4]}; }

    bool operator==(const MeanFieldState&) const = default;
};

/// |jm|^2 + jz^2, the squared scaled spin length.
inline double spin_length(const MeanFieldState& s) { return std::norm(s.jm) + s.jz * s.jz; }

inline double photon_number(const MeanFieldState& s) { return std::norm(s.a_mean); }

inline double state_distance(const MeanFieldState& a, const MeanFieldState& b) {
    const auto x = a.to_array(), y = b.to_array();
    double d = 0.0;
    for (int i = 0; i < 5; ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(d);
}

enum class Stability { stable, unstable, marginal };

inline std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

struct SteadySolution {
    MeanFieldState state;
    double residual_norm = 0.0;
    Stability stability = Stability::marginal;
    std::array<cplx, 5> eigenvalues{};
    int branch_id = 0;
};

/// Cavity amplitude slaved to a given spin coherence.
inline cplx cavity_mean(const ModelParams& p, cplx jm) {
    return -(0.5 * p.lambda * jm + p.omega_a) / cplx(p.delta_c, -p.kappa());
}

inline MeanFieldState state_from_spin(const ModelParams& p, cplx jm, double jz) { return {cavity_mean(p, jm), jm, jz}; }

/// jz = -1, jm = 0 with the displaced cavity field.
inline MeanFieldState trivial_state(const ModelParams& p) { return state_from_spin(p, 0.0, -1.0); }

/// Time derivative of the scaled expectation values.
inline std::array<double, 5> flow(const ModelParams& p, const MeanFieldState& s) {
    const cplx I(0.0, 1.0);
    const cplx da = -I * cplx(p.delta_c, -p.kappa()) * s.a_mean - I * (0.5 * p.lambda) * s.jm - I * p.omega_a;
    const cplx w = p.lambda * s.a_mean + p.omega_j;
    const cplx dm = -I * cplx(p.delta_s, -p.gamma_perp) * s.jm + 2.0 * I * s.jz * w;
    const double dz = 2.0 * std::imag(w * std::conj(s.jm)) - p.gamma_par * (1.0 + s.jz);
    return {da.real(), da.imag(), dm.real(), dm.imag(), dz};
}

inline double flow_norm(const ModelParams& p, const MeanFieldState& s) {
    const auto f = flow(p, s);
    double n = 0.0;
    for (double v : f) n += v * v;
    return std::sqrt(n);
}

/// Steady-state residuals: the cavity and spin-lowering equations flattened
/// to (re, im) pairs, then the inversion equation after division by i (which
/// leaves a real number).
inline std::array<double, 5> residual(const ModelParams& p, const MeanFieldState& s) {
    const cplx r1 = cplx(p.delta_c, -p.kappa()) * s.a_mean + (0.5 * p.lambda) * s.jm + p.omega_a;
    const cplx za = s.jz * s.a_mean;
    const cplx r2 = cplx(p.delta_s, -p.gamma_perp) * s.jm - 2.0 * p.lambda * za - 2.0 * s.jz * p.omega_j;
    const cplx ap = s.a_mean * std::conj(s.jm);
    const double r3 = 2.0 * p.lambda * ap.imag() + 2.0 * std::imag(p.omega_j * std::conj(s.jm)) - p.gamma_par * (1.0 + s.jz);
    return {r1.real(), r1.imag(), r2.real(), r2.imag(), r3};
}

inline double residual_norm(const ModelParams& p, const MeanFieldState& s) {
    const auto r = residual(p, s);
    double n = 0.0;
    for (double v : r) n += v * v;
    return std::sqrt(n);
}

/// Analytic Jacobian of flow() in (Re a, Im a, Re m, Im m, z).
inline Eigen::Matrix<double, 5, 5> flow_jacobian(const ModelParams& p, const MeanFieldState& s) {
    const double k = p.kappa(), l = p.lambda, z = s.jz;
    const cplx w = l * s.a_mean + p.omega_j;
    const double mr = s.jm.real(), mi = s.jm.imag();
    Eigen::Matrix<double, 5, 5> j;
    // clang-format off
    j << -k,          p.delta_c,  0.0,           0.5 * l,       0.0,
         -p.delta_c,  -k,         -0.5 * l,      0.0,           0.0,
         0.0,         -2*z*l,     -p.gamma_perp, p.delta_s,     -2.0 * w.imag(),
         2*z*l,       0.0,        -p.delta_s,    -p.gamma_perp, 2.0 * w.real(),
         -2.0*l*mi,   2.0*l*mr,   2.0 * w.imag(), -2.0 * w.real(), -p.gamma_par;
    // clang-format on
    return j;
}

/// True when the two drives cancel after the displacement, leaving the flow
/// invariant under a common phase rotation of the displaced cavity field and m.
inline bool drives_cancel(const ModelParams& p, double rel_tol = 1e-12) {
    const cplx alpha = -p.omega_a / cplx(p.delta_c, -p.kappa());
    const double scale = std::max(std::abs(p.omega_j), p.lambda * std::abs(alpha));
    return std::abs(p.omega_j + p.lambda * alpha) <= rel_tol * scale;
}

namespace detail {

/// Reduced root-finding system in u = (Re m, Im m, z).
///
/// Rows: spin equation (re, im); inversion equation, or the spin-length
/// constraint |m|^2 + z^2 = 1 when the flow conserves spin length (the
/// inversion equation is then implied by the spin equation); and a phase
/// gauge Im m = 0 when the drives cancel, otherwise a zero row.
struct ReducedSystem {
    cplx a0;      // Delta_s - i gamma_perp
    cplx e;       // -lambda^2 / (2 (Delta_c - i kappa))
    cplx d;       // residual drive
    double gamma_par = 0.0;
    bool conserve_spin = false;
    bool gauge = false;

    explicit ReducedSystem(const ModelParams& p)
        : a0(p.delta_s, -p.gamma_perp),
          e(-0.5 * p.lambda * p.lambda / cplx(p.delta_c, -p.kappa())),
          d(residual_drive(p)),
          gamma_par(p.gamma_par),
          conserve_spin(spin_conserving(p)),
          gauge(drives_cancel(p)) {}

    Eigen::Vector4d rows(const Eigen::Vector3d& u) const {
        const cplx m(u[0], u[1]);
        const double z = u[2];
        const cplx r2 = (a0 - 2.0 * z * e) * m - 2.0 * z * d;
        Eigen::Vector4d r;
        r[0] = r2.real();
        r[1] = r2.imag();
        if (conserve_spin)
            r[2] = std::norm(m) + z * z - 1.0;
        else
            r[2] = 2.0 * e.imag() * std::norm(m) + 2.0 * (d.imag() * u[0] - d.real() * u[1]) - gamma_par * (1.0 + z);
        r[3] = gauge ? u[1] : 0.0;
        return r;
    }

    Eigen::Matrix<double, 4, 3> jacobian(const Eigen::Vector3d& u) const {
        const cplx m(u[0], u[1]);
        const double z = u[2];
        const cplx b = a0 - 2.0 * z * e;
        const cplx dz = -2.0 * (e * m + d);
        Eigen::Matrix<double, 4, 3> j;
        j.row(0) << b.real(), -b.imag(), dz.real();
        j.row(1) << b.imag(), b.real(), dz.imag();
        if (conserve_spin)
            j.row(2) << 2.0 * u[0], 2.0 * u[1], 2.0 * z;
        else
            j.row(2) << 4.0 * e.imag() * u[0] + 2.0 * d.imag(), 4.0 * e.imag() * u[1] - 2.0 * d.real(), -gamma_par;
        if (gauge)
            j.row(3) << 0.0, 1.0, 0.0;
        else
            j.row(3).setZero();
        return j;
    }
};

inline Eigen::Vector3d reduced_coords(const MeanFieldState& s) { return {s.jm.real(), s.jm.imag(), s.jz}; }

/// Minimum-norm least-squares solve; tolerates the rank loss at pitchfork
/// points and on symmetry orbits.
template <int R, int C>
Eigen::Matrix<double, C, 1> lstsq(const Eigen::Matrix<double, R, C>& a, const Eigen::Matrix<double, R, 1>& b) {
    Eigen::JacobiSVD<Eigen::Matrix<double, R, C>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-13);
    return svd.solve(b);
}

}  // namespace detail

struct NewtonOptions {
    double tolerance = 1e-11;  // on the full 5-component residual norm
    int max_iterations = 200;
    bool classify = true;
};

/// Reports jm real and nonnegative when the drives cancel (the phase of the
/// broken-symmetry branch is a gauge choice then).
inline MeanFieldState fix_gauge(const ModelParams& p, MeanFieldState s) {
    if (!drives_cancel(p) || s.jm == cplx(0.0)) return s;
    const double r = std::abs(s.jm);
    const cplx rot = r / s.jm;
    // Rotating m and the displaced field together keeps the state a root.
    const cplx alpha = cavity_mean(p, 0.0);
    s.a_mean = alpha + (s.a_mean - alpha) * rot;
    s.jm = r;
    return s;
}

/// Damped Gauss-Newton on the reduced system. Returns the root with the
/// cavity field reconstructed; does not classify.
inline MeanFieldState newton_root(const ModelParams& p, const MeanFieldState& initial, const NewtonOptions& opt,
                                  double* final_residual = nullptr) {
    const detail::ReducedSystem sys(p);
    Eigen::Vector3d u = detail::reduced_coords(initial);
    if (!u.allFinite()) throw InputError("initial state must be finite");

    double full = 0.0;
    for (int it = 0; it <= opt.max_iterations; ++it) {
        const MeanFieldState s = state_from_spin(p, {u[0], u[1]}, u[2]);
        full = residual_norm(p, s);
        const Eigen::Vector4d r = sys.rows(u);
        const double nr = r.norm();
        if (full < opt.tolerance && nr < opt.tolerance) {
            if (final_residual) *final_residual = full;
            return s;
        }
        if (it == opt.max_iterations) break;

        const Eigen::Vector3d step = detail::lstsq<4, 3>(sys.jacobian(u), -r);
        double t = 1.0, best_t = 1.0, best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 11; ++k, t *= 0.5) {
            const double trial = sys.rows(u + t * step).norm();
            if (trial < best) best = trial, best_t = t;
            if (trial <= (1.0 - 1e-4 * t) * nr) {
                best_t = t;
                break;
            }
        }
        u += best_t * step;
        if (!u.allFinite()) break;
    }
    throw NoRootError("steady-state Newton iteration did not converge", {u[0], u[1], u[2]}, full);
}

struct Classification {
    Stability stability = Stability::marginal;
    std::array<cplx, 5> eigenvalues{};
};

/// Linear stability of a root from the spectrum of flow_jacobian(). When the
/// drives cancel and m != 0 the phase-rotation mode is an exact zero
/// eigenvalue; it is factored out before the verdict. Rate-free models are
/// conservative and always marginal.
inline Classification classify(const ModelParams& p, const MeanFieldState& s, double root_tol = 1e-8, double band = 1e-9) {
    if (!(residual_norm(p, s) <= root_tol)) throw InputError("classify: state is not a steady state");
    const Eigen::Matrix<double, 5, 5> j = flow_jacobian(p, s);
    Classification c;
    std::vector<cplx> decisive;

    const cplx shifted = s.a_mean - cavity_mean(p, 0.0);
    Eigen::Matrix<double, 5, 1> g;
    g << -shifted.imag(), shifted.real(), -s.jm.imag(), s.jm.real(), 0.0;
    if (drives_cancel(p) && std::abs(s.jm) > 1e-9 && (j * g).norm() <= 1e-8 * j.norm() * g.norm()) {
        Eigen::HouseholderQR<Eigen::Matrix<double, 5, 1>> qr(g);
        const Eigen::Matrix<double, 5, 5> q = qr.householderQ();
        const Eigen::Matrix<double, 5, 5> jq = q.transpose() * j * q;
        const Eigen::Matrix<double, 4, 4> rest = jq.bottomRightCorner<4, 4>();
        Eigen::EigenSolver<Eigen::Matrix<double, 4, 4>> es(rest, false);
        c.eigenvalues[0] = 0.0;
        for (int i = 0; i < 4; ++i) {
            c.eigenvalues[i + 1] = es.eigenvalues()[i];
            decisive.push_back(es.eigenvalues()[i]);
        }
    } else {
        Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(j, false);
        for (int i = 0; i < 5; ++i) {
            c.eigenvalues[i] = es.eigenvalues()[i];
            decisive.push_back(es.eigenvalues()[i]);
        }
    }
    std::sort(c.eigenvalues.begin(), c.eigenvalues.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });

    if (rate_free(p)) {
        c.stability = Stability::marginal;
        return c;
    }
    double max_re = -std::numeric_limits<double>::infinity();
    for (cplx ev : decisive) max_re = std::max(max_re, ev.real());
    c.stability = max_re < -band ? Stability::stable : (max_re > band ? Stability::unstable : Stability::marginal);
    return c;
}

inline SteadySolution make_solution(const ModelParams& p, const MeanFieldState& s, bool with_stability = true) {
    SteadySolution sol;
    sol.state = s;
    sol.residual_norm = residual_norm(p, s);
    if (with_stability) {
        const Classification c = classify(p, s);
        sol.stability = c.stability;
        sol.eigenvalues = c.eigenvalues;
    }
    return sol;
}

/// Newton from one initial state, gauge-fixed and classified.
inline SteadySolution solve_from(const ModelParams& p, const MeanFieldState& initial, const NewtonOptions& opt = {}) {
    const MeanFieldState root = fix_gauge(p, newton_root(p, initial, opt));
    return make_solution(p, root, opt.classify);
}

/// Lattice of initial guesses over jz in [-1, 1], |jm| in [0, 1] and the phase
/// of jm in [0, 2 pi).
struct GridSpec {
    int jz_points = 10;
    int abs_points = 10;
    int phase_points = 10;
    double dedup_distance = 1e-7;
    bool physical_only = true;  // keep |jz| <= 1 and |jm|^2 + jz^2 <= 1
    int max_iterations = 100;
};

inline bool is_physical(const MeanFieldState& s, double slack = 1e-9) {
    return std::abs(s.jz) <= 1.0 + slack && spin_length(s) <= 1.0 + slack;
}

/// Multi-start enumeration of distinct roots, sorted by jz then |jm|, each
/// classified and labelled by its position.
inline std::vector<SteadySolution> find_all(const ModelParams& p, const GridSpec& grid = {}) {
    if (grid.jz_points < 1 || grid.abs_points < 1 || grid.phase_points < 1) throw InputError("find_all: empty start grid");
    constexpr double two_pi = 6.283185307179586;
    NewtonOptions opt;
    opt.max_iterations = grid.max_iterations;
    opt.classify = false;

    std::vector<MeanFieldState> roots;
    auto lin = [](int n, int i, double lo, double hi) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); };
    for (int iz = 0; iz < grid.jz_points; ++iz) {
        for (int ir = 0; ir < grid.abs_points; ++ir) {
            for (int ip = 0; ip < grid.phase_points; ++ip) {
                const double z0 = lin(grid.jz_points, iz, -1.0, 1.0);
                const double r0 = lin(grid.abs_points, ir, 0.0, 1.0);
                const double ph = two_pi * ip / grid.phase_points;
                MeanFieldState root;
                try {
                    root = fix_gauge(p, newton_root(p, state_from_spin(p, std::polar(r0, ph), z0), opt));
                } catch (const NoRootError&) {
                    continue;
                }
                if (grid.physical_only && !is_physical(root)) continue;
                const bool seen = std::any_of(roots.begin(), roots.end(),
                                              [&](const MeanFieldState& q) { return state_distance(q, root) <= grid.dedup_distance; });
                if (!seen) roots.push_back(root);
            }
        }
    }
    if (roots.empty()) throw NoRootError("find_all: no root found from any start", {}, 0.0);

    std::sort(roots.begin(), roots.end(), [](const MeanFieldState& a, const MeanFieldState& b) {
        return a.jz != b.jz ? a.jz < b.jz : std::abs(a.jm) < std::abs(b.jm);
    });
    std::vector<SteadySolution> out;
    out.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        out.push_back(make_solution(p, roots[i]));
        out.back().branch_id = int(i);
    }
    return out;
}

/// The ordered-phase representative among coexisting roots: largest |jm|,
/// ties (within 1e-9) broken by the lowest jz.
inline const SteadySolution& ordered_root(const std::vector<SteadySolution>& roots) {
    if (roots.empty()) throw InputError("ordered_root: empty root set");
    const SteadySolution* best = &roots.front();
    for (const auto& r : roots) {
        const double da = std::abs(r.state.jm) - std::abs(best->state.jm);
        if (da > 1e-9 || (std::abs(da) <= 1e-9 && r.state.jz < best->state.jz)) best = &r;
    }
    return *best;
}

inline SteadySolution ordered_root(std::vector<SteadySolution>&& roots) { return ordered_root(roots); }

}  // namespace tcqpt
