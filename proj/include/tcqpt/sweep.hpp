#pragma once

// One-parameter sweeps: a parameter program maps a sweep value to a full
// parameter set, every value is solved for all roots, and selected branches
// are collected for export.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tcqpt/analytic.hpp"
#include "tcqpt/config.hpp"
#include "tcqpt/continuation.hpp"
#include "tcqpt/cumulant.hpp"
#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"

namespace tcqpt {

/// Sweep axes beyond the plain model keys. Both keep lambda (resp. Delta_c)
/// and the ratio Delta_s / Delta_c of the base set fixed.
inline constexpr std::string_view kLambdaOverDeltaC = "lambda_over_delta_c";
inline constexpr std::string_view kDeltaCOverLambda = "delta_c_over_lambda";

struct ParamProgram {
    ModelParams base;
    std::optional<Regime> regime;  // imposed after the sweep value
    double drive_factor = 1.0;
    double gain_factor = 1.0;
    std::string sweep_param = std::string(kLambdaOverDeltaC);

    void check() const {
        const bool derived = sweep_param == kLambdaOverDeltaC || sweep_param == kDeltaCOverLambda;
        if (!derived && !is_model_key(sweep_param)) throw InputError("unknown sweep parameter '" + sweep_param + "'");
        if (regime) {
            if (sweep_param == "omega_j_re" || sweep_param == "omega_j_im")
                throw InputError("sweep parameter '" + sweep_param + "' is fixed by the matching condition");
            if (*regime == Regime::gain_balanced && sweep_param == "kappa_g")
                throw InputError("kappa_g is fixed by the gain-balance condition");
        }
    }

    ModelParams at(double value) const {
        ModelParams p = base;
        const double ratio = base.delta_s / base.delta_c;
        if (sweep_param == kLambdaOverDeltaC) {
            if (!(value > 0.0)) throw InputError("lambda/delta_c must be > 0");
            set_param(p, "delta_c", p.lambda / value);
            set_param(p, "delta_s", p.delta_c * ratio);
        } else if (sweep_param == kDeltaCOverLambda) {
            set_param(p, "delta_c", value * p.lambda);
            set_param(p, "delta_s", p.delta_c * ratio);
        } else {
            set_param(p, sweep_param, value);
        }
        if (regime) p = apply_regime(p, *regime, drive_factor, gain_factor);
        validate(p);
        return p;
    }
};

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw InputError("point count must be >= 1");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    if (n > 1) v.back() = b;
    return v;
}

/// fn(i) for i in [0, n) on up to `threads` workers; results land by index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned threads, F&& fn) {
    std::vector<T> out(n);
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

struct BranchRow {
    double value = 0.0;
    MeanFieldState state;
    std::string stability;  // stable | unstable | marginal, or "-" for unclassified rows
    double residual_norm = 0.0;
    bool fold = false;
};

struct Branch {
    std::string name;
    std::vector<BranchRow> rows;
    bool has_fold_column = false;
    bool stalled = false;
};

struct SweepResult {
    std::string name;
    ParamProgram program;
    std::vector<double> values;
    std::vector<std::vector<SteadySolution>> records;         // all roots per value
    std::vector<std::optional<OrderParameters>> analytic;     // closed-form overlay per value
    std::vector<Branch> branches;
    KeyValues extra_meta;
};

struct SweepOptions {
    unsigned threads = 1;
    GridSpec grid{};
};

inline BranchRow row_from(double value, const SteadySolution& s) {
    return {value, s.state, std::string(to_string(s.stability)), s.residual_norm, false};
}

/// All roots at every value, plus the "ordered" branch: at each value the root
/// with the largest |jm| (lowest jz on ties).
inline SweepResult run_sweep(const std::string& name, const ParamProgram& program, const std::vector<double>& values,
                             const SweepOptions& opt = {}) {
    program.check();
    if (!std::is_sorted(values.begin(), values.end())) throw InputError("sweep values must be sorted");
    SweepResult r;
    r.name = name;
    r.program = program;
    r.values = values;
    r.records = parallel_map<std::vector<SteadySolution>>(values.size(), opt.threads, [&](std::size_t i) {
        try {
            return find_all(program.at(values[i]), opt.grid);
        } catch (const NoRootError&) {
            return std::vector<SteadySolution>{};
        }
    });
    Branch b;
    b.name = "ordered";
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!r.records[i].empty()) b.rows.push_back(row_from(values[i], ordered_root(r.records[i])));
    r.branches.push_back(std::move(b));
    return r;
}

/// Closed-form order parameters at every value (lambda-type sweeps of matched
/// Hermitian or gain-balanced programs only).
inline void attach_analytic(SweepResult& r) {
    r.analytic.assign(r.values.size(), std::nullopt);
    const auto& pr = r.program;
    if (!pr.regime || *pr.regime == Regime::lossy || pr.drive_factor != 1.0 || pr.gain_factor != 1.0) return;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        const ModelParams p = pr.at(r.values[i]);
        r.analytic[i] = closed_form_order(p, p.lambda, *pr.regime);
    }
}

namespace detail {

inline Branch branch_from_trace(const std::string& name, const BranchTrace& t) {
    Branch b;
    b.name = name;
    b.has_fold_column = true;
    b.stalled = t.stalled;
    for (const auto& pt : t.points) {
        BranchRow row = row_from(pt.value, pt.solution);
        row.fold = pt.fold;
        b.rows.push_back(row);
    }
    return b;
}

inline ParameterPath sweep_path(const SweepResult& r) {
    return {[&r](double v) { return r.program.at(v); }, r.values.front(), r.values.back()};
}

}  // namespace detail

/// Continued branches covering the sweep window: forward from the lowest-jz
/// root at the first value and, when that trace does not reach the last
/// value, backward from the highest-jz root there.
inline std::vector<Branch> continued_branches(const SweepResult& r, const ContinuationOptions& co = {}) {
    std::vector<Branch> out;
    if (r.values.size() < 2 || r.records.front().empty()) return out;
    const ParameterPath path = detail::sweep_path(r);
    const BranchTrace fwd = continue_branch(path, r.records.front().front(), co);
    out.push_back(detail::branch_from_trace("branch0", fwd));
    const bool reached_end = !fwd.stalled && !fwd.left_window && fwd.points.back().value == path.end;
    if (!reached_end && !r.records.back().empty()) {
        ParameterPath back{path.at, path.end, path.start};
        out.push_back(detail::branch_from_trace("branch1", continue_branch(back, r.records.back().back(), co)));
    }
    return out;
}

/// The branch continuously connected to the normal-phase root: traced
/// forward from the lowest-jz root at the first value.
inline std::optional<Branch> connected_branch(const SweepResult& r, const ContinuationOptions& co = {}) {
    if (r.values.size() < 2 || r.records.front().empty()) return std::nullopt;
    return detail::branch_from_trace("connected", continue_branch(detail::sweep_path(r), r.records.front().front(), co));
}

/// Cumulant solutions seeded from the ordered branch.
inline Branch cumulant_branch(const SweepResult& r, unsigned threads = 1) {
    const Branch& mf = r.branches.front();
    auto rows = parallel_map<BranchRow>(mf.rows.size(), threads, [&](std::size_t i) {
        const ModelParams p = r.program.at(mf.rows[i].value);
        const CumulantSolution c = solve_cumulant(p, mf.rows[i].state);
        return BranchRow{mf.rows[i].value, c.state.base, "-", c.residual_norm, false};
    });
    return {"cumulant", std::move(rows), false, false};
}

}  // namespace tcqpt
