// tcqpt: steady states, sweeps, trajectories and figure data of the driven
// non-Hermitian Tavis-Cummings mean-field model.
//
//   tcqpt solve --config model.cfg --regime gain_balanced
//   tcqpt sweep --config model.cfg --regime hermitian --param lambda_over_delta_c
//               --from 0.5 --to 2 --out out/
//   tcqpt dynamics --config model.cfg --horizon 200 --out traj.csv
//   tcqpt figure fig2 --out out/
//   tcqpt exponent --observable jz --figure fig2
//
// Exit codes: 0 success, 2 bad input, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tcqpt/tcqpt.hpp"

namespace {

using namespace tcqpt;

struct ModelInput {
    std::string config;
    std::map<std::string, std::string> flags;
    std::vector<std::string> sets;
    std::string regime;
    double drive_factor = 1.0;
    double gain_factor = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "key = value parameter file")->check(CLI::ExistingFile);
        for (auto key : kModelKeys) {
            const std::string k(key);
            app->add_option_function<std::string>("--" + k, [this, k](const std::string& v) { flags[k] = v; }, "model parameter " + k);
        }
        app->add_option("--set", sets, "override key=value (repeatable)");
        app->add_option("--regime", regime, "impose a matching regime")->check(CLI::IsMember({"hermitian", "lossy", "gain_balanced"}));
        app->add_option("--drive-factor", drive_factor, "drive ratio multiplier under --regime");
        app->add_option("--gain-factor", gain_factor, "gain multiplier under --regime gain_balanced");
    }

    std::map<std::string, std::string> overrides() const {
        auto all = flags;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
            all[std::string(detail::trim(s.substr(0, eq)))] = std::string(detail::trim(s.substr(eq + 1)));
        }
        return all;
    }

    /// Config file first, then flags; flags win.
    ModelParams base() const {
        ModelParams p;
        const auto ov = overrides();
        if (!config.empty()) {
            p = load_config(config);
            for (const auto& [k, v] : ov) set_param(p, k, parse_double(v, k));
            validate(p);
        } else {
            KeyValues kv(ov.begin(), ov.end());
            p = params_from_key_values(kv);
        }
        return p;
    }

    std::optional<Regime> regime_opt() const {
        if (regime.empty()) return std::nullopt;
        return parse_regime(regime);
    }

    ModelParams resolved() const {
        ModelParams p = base();
        if (auto r = regime_opt()) p = apply_regime(p, *r, drive_factor, gain_factor);
        return p;
    }
};

void print_roots(std::ostream& os, const std::vector<SteadySolution>& roots) {
    os << "branch_id,jz,jm_re,jm_im,a_re,a_im,n_phot,F,stability,residual_norm,max_re_eigenvalue\n";
    for (const auto& r : roots) {
        const auto& s = r.state;
        os << r.branch_id;
        for (double v : {s.jz, s.jm.real(), s.jm.imag(), s.a_mean.real(), s.a_mean.imag(), photon_number(s), spin_length(s)})
            os << ',' << format_double(v);
        os << ',' << to_string(r.stability) << ',' << format_double(r.residual_norm) << ','
           << format_double(r.eigenvalues[0].real()) << '\n';
    }
}

void report_files(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::cout << f.string() << '\n';
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field steady states of the driven non-Hermitian Tavis-Cummings model"};
    app.require_subcommand(1);

    // solve
    ModelInput solve_in;
    int grid = 10;
    std::vector<double> start;
    auto* solve = app.add_subcommand("solve", "all steady states (or one, from --start)");
    solve_in.attach(solve);
    solve->add_option("--grid", grid, "start lattice points per axis")->check(CLI::Range(1, 100));
    solve->add_option("--start", start, "jz jm_re jm_im: single Newton solve from this spin state")->expected(3);

    // sweep
    ModelInput sweep_in;
    std::string sweep_param = std::string(kLambdaOverDeltaC), out_dir = ".", name = "sweep";
    double from = 0.5, to = 2.0;
    int points = 501, sweep_grid = 6;
    unsigned threads = default_threads();
    bool continued = false, with_cumulant = false;
    auto* sweep = app.add_subcommand("sweep", "one-parameter sweep written as CSV");
    sweep_in.attach(sweep);
    sweep->add_option("--param", sweep_param, "lambda_over_delta_c, delta_c_over_lambda or a model key");
    sweep->add_option("--from", from);
    sweep->add_option("--to", to);
    sweep->add_option("--points", points)->check(CLI::Range(0, 1000000));
    sweep->add_option("--grid", sweep_grid, "start lattice points per axis")->check(CLI::Range(1, 100));
    sweep->add_option("--threads", threads)->check(CLI::Range(1u, 1024u));
    sweep->add_option("--out", out_dir);
    sweep->add_option("--name", name, "file name prefix");
    sweep->add_flag("--continue", continued, "export continued branches with fold markers");
    sweep->add_flag("--cumulant", with_cumulant, "add the cumulant-closure branch");

    // dynamics
    ModelInput dyn_in;
    double horizon = 100.0, seed = 1e-3;
    std::vector<double> dyn_start;
    std::string traj_out;
    bool do_settle = false;
    int stride = 1;
    auto* dyn = app.add_subcommand("dynamics", "integrate the mean-field equations of motion");
    dyn_in.attach(dyn);
    dyn->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
    dyn->add_option("--start", dyn_start, "jz jm_re jm_im (cavity field slaved); default: trivial state plus --seed")->expected(3);
    dyn->add_option("--seed", seed, "jm added to the trivial state when --start is absent");
    dyn->add_option("--out", traj_out, "trajectory CSV (default stdout)");
    dyn->add_option("--stride", stride, "write every n-th step")->check(CLI::PositiveNumber);
    dyn->add_flag("--settle", do_settle, "integrate to rest, polish with Newton and print the root");

    // figure
    std::string figure_id;
    std::string fig_out = ".";
    int fig_points = 501, fig_grid = 6;
    unsigned fig_threads = default_threads();
    std::vector<std::string> fig_sets;
    auto* fig = app.add_subcommand("figure", "reproduce a figure's data");
    fig->add_option("id", figure_id, "fig2 fig3 fig4a fig4b figS1a figS1b figS2a figS2b figS2c figS2d")->required();
    fig->add_option("--out", fig_out);
    fig->add_option("--points", fig_points)->check(CLI::Range(1, 1000000));
    fig->add_option("--grid", fig_grid)->check(CLI::Range(1, 100));
    fig->add_option("--threads", fig_threads)->check(CLI::Range(1u, 1024u));
    fig->add_option("--set", fig_sets, "override key=value on the figure's base parameters (repeatable)");

    // exponent
    std::string observable = "jz", exp_figure = "fig2", exp_regime;
    int exp_samples = 16;
    auto* expo = app.add_subcommand("exponent", "critical exponent from solver data near threshold");
    expo->add_option("--observable", observable)->check(CLI::IsMember({"jz", "jm", "n_phot"}));
    expo->add_option("--figure", exp_figure, "parameter set")->check(CLI::IsMember({"fig2"}));
    expo->add_option("--regime", exp_regime, "hermitian or gain_balanced (default both)")->check(CLI::IsMember({"hermitian", "gain_balanced"}));
    expo->add_option("--samples", exp_samples)->check(CLI::Range(8, 10000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*solve) {
            const ModelParams p = solve_in.resolved();
            std::vector<SteadySolution> roots;
            if (!start.empty())
                roots.push_back(solve_from(p, state_from_spin(p, {start[1], start[2]}, start[0])));
            else
                roots = find_all(p, GridSpec{grid, grid, grid});
            std::cout << format_config(p);
            print_roots(std::cout, roots);
        } else if (*sweep) {
            ParamProgram pr;
            pr.base = sweep_in.base();
            pr.regime = sweep_in.regime_opt();
            pr.drive_factor = sweep_in.drive_factor;
            pr.gain_factor = sweep_in.gain_factor;
            pr.sweep_param = sweep_param;
            const auto values = points == 0 ? std::vector<double>{} : linspace(std::min(from, to), std::max(from, to), points);
            SweepResult r = run_sweep(name, pr, values, {threads, GridSpec{sweep_grid, sweep_grid, sweep_grid}});
            if (with_cumulant) r.branches.push_back(cumulant_branch(r, threads));
            if (continued) {
                auto extra = continued_branches(r);
                r.branches.insert(r.branches.end(), extra.begin(), extra.end());
            }
            report_files(export_result(r, out_dir));
        } else if (*dyn) {
            const ModelParams p = dyn_in.resolved();
            MeanFieldState s0 = dyn_start.empty() ? state_from_spin(p, seed, -1.0) : state_from_spin(p, {dyn_start[1], dyn_start[2]}, dyn_start[0]);
            if (do_settle) {
                print_roots(std::cout, {settle(p, s0, horizon)});
                return 0;
            }
            const Trajectory tr = integrate(p, s0, horizon);
            if (tr.conservative_warning) std::cerr << "warning: rate-free model, no relaxation expected\n";
            std::string text = "t,jz,jm_re,jm_im,a_re,a_im,F,flow_norm\n";
            for (std::size_t i = 0; i < tr.states.size(); ++i) {
                if (i % stride != 0 && i + 1 != tr.states.size()) continue;
                const auto& s = tr.states[i];
                for (double v : {tr.times[i], s.jz, s.jm.real(), s.jm.imag(), s.a_mean.real(), s.a_mean.imag(), spin_length(s)})
                    text += format_double(v) + ",";
                text += format_double(flow_norm(p, s)) + "\n";
            }
            if (traj_out.empty())
                std::cout << text;
            else
                write_text_file(traj_out, text);
            std::cerr << (tr.converged ? "converged" : "not converged") << " at t = " << format_double(tr.times.back())
                      << ", flow norm " << format_double(tr.final_residual) << '\n';
        } else if (*fig) {
            FigureOptions o;
            o.points = fig_points;
            o.threads = fig_threads;
            o.grid = GridSpec{fig_grid, fig_grid, fig_grid};
            for (const auto& s : fig_sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
                o.overrides[std::string(detail::trim(s.substr(0, eq)))] = std::string(detail::trim(s.substr(eq + 1)));
            }
            for (const auto& r : run_figure(figure_id, o)) report_files(export_result(r, fig_out));
        } else if (*expo) {
            const Observable obs = parse_observable(observable);
            ExponentOptions eo;
            eo.samples = exp_samples;
            std::vector<Regime> regimes = {Regime::hermitian, Regime::gain_balanced};
            if (!exp_regime.empty()) regimes = {parse_regime(exp_regime)};
            std::cout << "regime,observable,lambda_c,exponent,amplitude,r_squared,samples\n";
            for (Regime rg : regimes) {
                const ExponentStudy st = exponent_from_solver(figure_base(rg != Regime::hermitian), rg, obs, eo);
                std::cout << to_string(rg) << ',' << observable << ',' << format_double(st.lambda_c) << ','
                          << format_double(st.fit.exponent) << ',' << format_double(st.fit.amplitude) << ','
                          << format_double(st.fit.r_squared) << ',' << st.fit.used << '\n';
            }
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
