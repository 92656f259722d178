#pragma once

// Parameter programs of the reproduced figures.
//
//   fig2, fig3    lambda/Delta_c in [0.5, 2]: rate-free Hermitian case and the
//                 gain-balanced case (kappa_c = gamma_perp = 1, gamma_par = 0.1)
//   fig4a         gain-balanced, drive ratio times {1.0, 1.1, 1.2}
//   fig4b         gain-balanced drive ratio, gain times {1.0, 1.2, 1.4}
//   figS1a/b      lossy cavity without gain, ratio times 1.0 / 1.2, mean field
//                 against the cumulant closure
//   figS2a..d     Delta_c/lambda in [0.02, 2.5], lossy ratio times
//                 0.87 / 0.77 / 0.7 / 0.6, continued branches with folds
//
// Common base: lambda = 8, omega_a = 1, Delta_s = Delta_c.

#include <string>
#include <string_view>
#include <vector>

#include "tcqpt/config.hpp"
#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/sweep.hpp"

namespace tcqpt {

inline constexpr std::array<std::string_view, 10> kFigureIds = {"fig2",   "fig3",   "fig4a",  "fig4b",  "figS1a",
                                                                  "figS1b", "figS2a", "figS2b", "figS2c", "figS2d"};

struct FigureOptions {
    int points = 501;
    unsigned threads = 1;
    GridSpec grid{6, 6, 6};
    KeyValues overrides;  // numeric model keys applied to every base set
};

struct FigureCase {
    std::string name;
    ParamProgram program;
    double start = 0.0, end = 0.0;
    bool cumulant = false;
    bool continued = false;
    bool connected = false;  // add the branch traced from the normal-phase root
};

inline ModelParams figure_base(bool dissipative) {
    ModelParams p;
    p.lambda = 8.0;
    p.delta_c = p.delta_s = 8.0;
    p.omega_a = 1.0;
    if (dissipative) {
        p.kappa_c = 1.0;
        p.gamma_perp = 1.0;
        p.gamma_par = 0.1;
    }
    return p;
}

inline std::vector<FigureCase> figure_cases(std::string_view id, const KeyValues& overrides = {}) {
    auto program = [&](bool dissipative, std::optional<Regime> regime, double drive, double gain, std::string_view sweep) {
        ParamProgram pr;
        pr.base = figure_base(dissipative);
        for (const auto& [k, v] : overrides) {
            if (!is_model_key(k)) throw InputError("override key '" + k + "' is not a model parameter");
            set_param(pr.base, k, parse_double(v, k));
        }
        validate(pr.base);
        pr.regime = regime;
        pr.drive_factor = drive;
        pr.gain_factor = gain;
        pr.sweep_param = std::string(sweep);
        return pr;
    };
    const std::string fig(id);
    std::vector<FigureCase> cases;
    if (id == "fig2" || id == "fig3") {
        cases.push_back({fig + "_hermitian", program(false, Regime::hermitian, 1, 1, kLambdaOverDeltaC), 0.5, 2.0});
        cases.push_back({fig + "_gain_balanced", program(true, Regime::gain_balanced, 1, 1, kLambdaOverDeltaC), 0.5, 2.0});
    } else if (id == "fig4a") {
        for (double f : {1.0, 1.1, 1.2})
            cases.push_back({fig + "_drive_" + format_double(f), program(true, Regime::gain_balanced, f, 1, kLambdaOverDeltaC), 0.5, 2.0,
                             false, false, true});
    } else if (id == "fig4b") {
        for (double g : {1.0, 1.2, 1.4})
            cases.push_back({fig + "_gain_" + format_double(g), program(true, Regime::gain_balanced, 1, g, kLambdaOverDeltaC), 0.5, 2.0,
                             false, false, true});
    } else if (id == "figS1a" || id == "figS1b") {
        const double f = id == "figS1a" ? 1.0 : 1.2;
        cases.push_back({fig + "_lossy_" + format_double(f), program(true, Regime::lossy, f, 1, kLambdaOverDeltaC), 0.5, 2.0, true});
    } else if (id.size() == 6 && id.substr(0, 5) == "figS2" && id[5] >= 'a' && id[5] <= 'd') {
        const double f = std::array{0.87, 0.77, 0.7, 0.6}[id[5] - 'a'];
        cases.push_back({fig + "_lossy_" + format_double(f), program(true, Regime::lossy, f, 1, kDeltaCOverLambda), 0.02, 2.5, false, true});
    } else {
        throw InputError("unknown figure '" + fig + "'");
    }
    for (const auto& c : cases) c.program.check();
    return cases;
}

inline std::vector<SweepResult> run_figure(std::string_view id, const FigureOptions& o = {}) {
    std::vector<SweepResult> out;
    for (const auto& c : figure_cases(id, o.overrides)) {
        SweepResult r = run_sweep(c.name, c.program, linspace(c.start, c.end, o.points), {o.threads, o.grid});
        r.extra_meta["figure"] = std::string(id);
        attach_analytic(r);
        if (c.cumulant) r.branches.push_back(cumulant_branch(r, o.threads));
        if (c.continued) r.branches = continued_branches(r);
        if (c.connected)
            if (auto b = connected_branch(r)) r.branches.push_back(std::move(*b));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace tcqpt
