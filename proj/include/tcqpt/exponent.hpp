#pragma once

// Critical exponents measured on solver roots just above threshold.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tcqpt/analytic.hpp"
#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"
#include "tcqpt/steady.hpp"
#include "tcqpt/sweep.hpp"

namespace tcqpt {

enum class Observable { jz, jm, n_phot };

inline Observable parse_observable(std::string_view s) {
    if (s == "jz") return Observable::jz;
    if (s == "jm") return Observable::jm;
    if (s == "n_phot") return Observable::n_phot;
    throw InputError("unknown observable '" + std::string(s) + "' (expected jz, jm or n_phot)");
}

inline double observe(const MeanFieldState& s, Observable o) {
    switch (o) {
        case Observable::jz: return s.jz;
        case Observable::jm: return std::abs(s.jm);
        case Observable::n_phot: return photon_number(s);
    }
    return 0.0;
}

struct ExponentStudy {
    double lambda_c = 0.0;
    double value_at_critical = 0.0;
    std::vector<CriticalSample> samples;
    ExponentFit fit;
};

struct ExponentOptions {
    int samples = 16;
    double log10_min = -5.0;  // relative distance (lambda - lambda_c) / lambda_c
    double log10_max = -3.0;
    GridSpec grid{6, 6, 6};
};

/// Varies lambda at fixed detunings with the regime re-imposed at every
/// point, takes the ordered root, and fits the observable's power law.
inline ExponentStudy exponent_from_solver(const ModelParams& base, Regime regime, Observable obs, const ExponentOptions& o = {}) {
    if (regime == Regime::lossy) throw InputError("no transition in the lossy regime");
    if (regime == Regime::hermitian && !rate_free(base)) throw InputError("the hermitian regime needs all rates zero");
    auto at = [&](double lambda) {
        ModelParams p = base;
        p.lambda = lambda;
        return apply_regime(p, regime);
    };
    ExponentStudy st;
    st.lambda_c = closed_form_critical_coupling(at(base.lambda), regime);
    st.value_at_critical = observe(ordered_root(find_all(at(st.lambda_c), o.grid)).state, obs);
    for (double t : linspace(o.log10_min, o.log10_max, o.samples)) {
        const double lambda = st.lambda_c * (1.0 + std::pow(10.0, t));
        st.samples.push_back({lambda, observe(ordered_root(find_all(at(lambda), o.grid)).state, obs)});
    }
    st.fit = fit_critical_exponent(st.samples, st.lambda_c, st.value_at_critical);
    return st;
}

}  // namespace tcqpt
