#pragma once

// Branch continuation of steady states along a one-parameter path.
//
// Natural-parameter steps are used while the branch is a graph over the
// parameter; near folds (small parameter component of the unit tangent) the
// stepper switches to pseudo-arclength with the tangent as the bordering row.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"

namespace tcqpt {

struct ParameterPath {
    std::function<ModelParams(double)> at;
    double start = 0.0;
    double end = 0.0;
};

struct ContinuationOptions {
    double initial_step = 5e-3;   // fraction of |end - start|
    double max_step = 2e-2;       // fraction of |end - start|
    double min_step = 1e-10;      // fraction of |end - start|; below this the branch stalls
    double natural_threshold = 0.3;
    double tolerance = 1e-11;
    int corrector_iterations = 25;
    int max_points = 100000;
};

struct ContinuationPoint {
    double value = 0.0;
    SteadySolution solution;
    bool fold = false;
};

struct BranchTrace {
    std::vector<ContinuationPoint> points;
    bool stalled = false;
    bool left_window = false;  // turned back past the path start
    int folds = 0;
};

namespace detail {

struct PathSystem {
    const ParameterPath& path;

    Eigen::Vector4d rows(const Eigen::Vector3d& u, double s) const { return ReducedSystem(path.at(s)).rows(u); }

    Eigen::Vector4d d_ds(const Eigen::Vector3d& u, double s) const {
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        return (rows(u, s + h) - rows(u, s - h)) / (2.0 * h);
    }

    Eigen::Matrix4d augmented(const Eigen::Vector3d& u, double s) const {
        Eigen::Matrix4d m;
        m.leftCols<3>() = ReducedSystem(path.at(s)).jacobian(u);
        m.col(3) = d_ds(u, s);
        return m;
    }

    /// Unit null vector of [G_u | G_s] in (u, s).
    Eigen::Vector4d tangent(const Eigen::Vector3d& u, double s) const {
        Eigen::JacobiSVD<Eigen::Matrix4d> svd(augmented(u, s), Eigen::ComputeFullV);
        return svd.matrixV().col(3).normalized();
    }

    bool accept(const Eigen::Vector3d& u, double s, double tol) const {
        const ModelParams p = path.at(s);
        return rows(u, s).norm() < tol && residual_norm(p, state_from_spin(p, {u[0], u[1]}, u[2])) < tol;
    }

    /// Newton at fixed parameter. A parameter outside the path's domain
    /// counts as a failed step.
    bool correct_natural(Eigen::Vector3d& u, double s, const ContinuationOptions& o) const try {
        const ReducedSystem sys(path.at(s));
        for (int it = 0; it < o.corrector_iterations; ++it) {
            if (accept(u, s, o.tolerance)) return true;
            u += lstsq<4, 3>(sys.jacobian(u), Eigen::Vector4d(-sys.rows(u)));
            if (!u.allFinite()) return false;
        }
        return accept(u, s, o.tolerance);
    } catch (const InputError&) {
        return false;
    }

    /// Newton on the bordered system G = 0, t . (x - x_pred) = 0.
    bool correct_arclength(Eigen::Vector4d& x, const Eigen::Vector4d& t, const ContinuationOptions& o) const try {
        const Eigen::Vector4d pred = x;
        for (int it = 0; it < o.corrector_iterations; ++it) {
            const Eigen::Vector3d u = x.head<3>();
            if (accept(u, x[3], o.tolerance)) return true;
            Eigen::Matrix<double, 5, 4> j;
            j.topRows<4>() = augmented(u, x[3]);
            j.row(4) = t.transpose();
            Eigen::Matrix<double, 5, 1> r;
            r.head<4>() = rows(u, x[3]);
            r[4] = t.dot(x - pred);
            x += lstsq<5, 4>(j, Eigen::Matrix<double, 5, 1>(-r));
            if (!x.allFinite()) return false;
        }
        return accept(x.head<3>(), x[3], o.tolerance);
    } catch (const InputError&) {
        return false;
    }
};

}  // namespace detail

/// Follows the branch through `seed` from path.start to path.end. A
/// zero-length path yields the seed alone.
inline BranchTrace continue_branch(const ParameterPath& path, const SteadySolution& seed, const ContinuationOptions& o = {}) {
    BranchTrace trace;
    {
        const ModelParams p0 = path.at(path.start);
        if (!(residual_norm(p0, seed.state) < 1e-9)) throw InputError("continue_branch: seed is not a root at the path start");
    }
    trace.points.push_back({path.start, seed, false});
    const double span = path.end - path.start;
    if (span == 0.0) return trace;
    const double dir = span > 0 ? 1.0 : -1.0;
    const double len = std::abs(span);

    const detail::PathSystem sys{path};
    Eigen::Vector3d u = detail::reduced_coords(seed.state);
    double s = path.start;
    double h = o.initial_step * len;
    Eigen::Vector4d t_prev = Eigen::Vector4d::Zero();

    auto record = [&](const Eigen::Vector3d& uu, double ss, bool fold) {
        const ModelParams p = path.at(ss);
        SteadySolution sol = make_solution(p, fix_gauge(p, state_from_spin(p, {uu[0], uu[1]}, uu[2])));
        trace.points.push_back({ss, sol, fold});
        if (fold) ++trace.folds;
    };

    while (int(trace.points.size()) < o.max_points) {
        Eigen::Vector4d t = sys.tangent(u, s);
        if (t_prev.isZero() ? t[3] * dir < 0 : t.dot(t_prev) < 0) t = -t;

        bool done = false, ok = false;
        Eigen::Vector3d u_new;
        double s_new = 0.0;
        if (std::abs(t[3]) >= o.natural_threshold) {
            double ds = h * t[3];
            s_new = s + ds;
            if ((s_new - path.end) * dir >= 0) s_new = path.end, ds = s_new - s, done = true;
            u_new = u + t.head<3>() * (ds / t[3]);
            ok = sys.correct_natural(u_new, s_new, o) && (u_new - u).norm() <= 6.0 * h;
        } else {
            Eigen::Vector4d x;
            x << u, s;
            x += h * t;
            ok = sys.correct_arclength(x, t, o);
            u_new = x.head<3>();
            s_new = x[3];
            ok = ok && std::hypot((u_new - u).norm(), s_new - s) <= 2.0 * h;
            if (ok && (s_new - path.end) * dir >= 0) {
                const double frac = (path.end - s) / (s_new - s);
                u_new = u + frac * (u_new - u);
                s_new = path.end;
                ok = sys.correct_natural(u_new, s_new, o);
                done = true;
            }
        }

        if (!ok) {
            h *= 0.5;
            if (h < o.min_step * len) {
                trace.stalled = true;
                break;
            }
            continue;
        }

        if ((s_new - path.start) * dir < 0) {
            trace.left_window = true;
            break;
        }
        const Eigen::Vector4d t_new = sys.tangent(u_new, s_new);
        const double ts_new = t_new.dot(t) < 0 ? -t_new[3] : t_new[3];
        const bool fold = t[3] * ts_new < 0;
        record(u_new, s_new, fold);
        t_prev = t;
        u = u_new;
        s = s_new;
        if (done) break;
        h = std::min(1.5 * h, o.max_step * len);
    }
    return trace;
}

}  // namespace tcqpt
