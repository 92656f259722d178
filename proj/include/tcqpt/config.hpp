#pragma once

// Flat "key = value" text format for ModelParams and run metadata.
//
//   # comment
//   delta_c = 8
//   lambda  = 8
//   omega_a_re = 1
//
// Numbers are written in the shortest form that reads back bit-identically.

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "tcqpt/error.hpp"
#include "tcqpt/model.hpp"

namespace tcqpt {

inline constexpr std::array<std::string_view, 17> kModelKeys = {
    "omega_c", "omega_s",    "omega_d",    "delta_c",    "delta_s", "lambda",  "n_tls",     "omega_a_re", "omega_a_im",
    "omega_j_re", "omega_j_im", "kappa_c", "kappa_g", "gamma_perp", "gamma_par", "gamma_p", "gamma_h"};

inline bool is_model_key(std::string_view key) {
    for (auto k : kModelKeys)
        if (k == key) return true;
    return false;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buf.data(), end);
}

inline double parse_double(std::string_view text, std::string_view key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw InputError("bad numeric value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Ordered key/value pairs of one configuration text.
using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = detail::trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw InputError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw InputError("line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(std::string(key), std::string(value)).second)
            throw InputError("duplicate key '" + std::string(key) + "'");
    }
    return out;
}

/// Builds ModelParams from key/value pairs. Keys outside the model set are an
/// error unless listed in `extra_allowed`. Missing rates and drives default to
/// zero and n_tls to 1; the detunings (directly or via the frequency triple)
/// and lambda are required.
inline ModelParams params_from_key_values(const KeyValues& kv, std::span<const std::string_view> extra_allowed = {}) {
    for (const auto& [k, v] : kv) {
        bool ok = is_model_key(k);
        for (auto e : extra_allowed) ok = ok || e == k;
        if (!ok) throw InputError("unknown configuration key '" + k + "'");
    }
    auto get = [&](std::string_view key) -> std::optional<double> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return parse_double(it->second, key);
    };

    ModelParams p;
    const auto oc = get("omega_c"), os = get("omega_s"), od = get("omega_d");
    const auto dc = get("delta_c"), ds = get("delta_s");
    if (oc || os || od) {
        if (!(oc && os && od)) throw InputError("omega_c, omega_s and omega_d must be given together");
        set_frequencies(p, *oc, *os, *od);
        if (dc) {
            if (!detail::close_rel(*dc, p.delta_c, kConsistencyTol))
                throw InputError("delta_c inconsistent with omega_c - omega_d");
            p.delta_c = *dc;
        }
        if (ds) {
            if (!detail::close_rel(*ds, p.delta_s, kConsistencyTol))
                throw InputError("delta_s inconsistent with omega_s - omega_d");
            p.delta_s = *ds;
        }
    } else {
        if (!dc || !ds) throw InputError("delta_c and delta_s (or omega_c, omega_s, omega_d) are required");
        p.delta_c = *dc;
        p.delta_s = *ds;
    }
    const auto lam = get("lambda");
    if (!lam) throw InputError("lambda is required");
    p.lambda = *lam;
    p.n_tls = get("n_tls").value_or(1.0);
    p.omega_a = {get("omega_a_re").value_or(0.0), get("omega_a_im").value_or(0.0)};
    p.omega_j = {get("omega_j_re").value_or(0.0), get("omega_j_im").value_or(0.0)};
    p.kappa_c = get("kappa_c").value_or(0.0);
    p.kappa_g = get("kappa_g").value_or(0.0);

    const auto gperp = get("gamma_perp"), gpar = get("gamma_par");
    const auto gp = get("gamma_p"), gh = get("gamma_h");
    if (gp || gh) {
        ModelParams q;
        set_emitter_rates(q, gp.value_or(0.0), gh.value_or(0.0));
        p.gamma_p = gp.value_or(0.0);
        p.gamma_h = gh.value_or(0.0);
        p.gamma_perp = gperp.value_or(q.gamma_perp);
        p.gamma_par = gpar.value_or(q.gamma_par);
        if (!detail::close_rel(p.gamma_perp, q.gamma_perp, kConsistencyTol) ||
            !detail::close_rel(p.gamma_par, q.gamma_par, kConsistencyTol))
            throw InputError("gamma_perp/gamma_par inconsistent with gamma_p/gamma_h");
    } else {
        p.gamma_perp = gperp.value_or(0.0);
        p.gamma_par = gpar.value_or(0.0);
    }
    validate(p);
    return p;
}

inline ModelParams parse_config(std::string_view text) { return params_from_key_values(parse_key_values(text)); }

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ModelParams load_config(const std::string& path) { return parse_config(read_text_file(path)); }

/// Every field of `p` as key/value pairs; optional provenance keys only when set.
inline KeyValues to_key_values(const ModelParams& p) {
    KeyValues kv;
    auto put = [&](const char* k, double v) { kv.emplace(k, format_double(v)); };
    if (p.omega_c) {
        put("omega_c", *p.omega_c);
        put("omega_s", *p.omega_s);
        put("omega_d", *p.omega_d);
    }
    put("delta_c", p.delta_c);
    put("delta_s", p.delta_s);
    put("lambda", p.lambda);
    put("n_tls", p.n_tls);
    put("omega_a_re", p.omega_a.real());
    put("omega_a_im", p.omega_a.imag());
    put("omega_j_re", p.omega_j.real());
    put("omega_j_im", p.omega_j.imag());
    put("kappa_c", p.kappa_c);
    put("kappa_g", p.kappa_g);
    put("gamma_perp", p.gamma_perp);
    put("gamma_par", p.gamma_par);
    if (p.gamma_p) put("gamma_p", *p.gamma_p);
    if (p.gamma_h) put("gamma_h", *p.gamma_h);
    return kv;
}

/// Model keys first in canonical order, then any extra keys alphabetically.
inline std::string format_key_values(const KeyValues& kv) {
    std::string out;
    for (auto k : kModelKeys) {
        auto it = kv.find(k);
        if (it != kv.end()) out += it->first + " = " + it->second + "\n";
    }
    for (const auto& [k, v] : kv)
        if (!is_model_key(k)) out += k + " = " + v + "\n";
    return out;
}

inline std::string format_config(const ModelParams& p) { return format_key_values(to_key_values(p)); }

/// Overrides a single model key on an existing parameter set, keeping any
/// redundant provenance fields in sync.
inline void set_param(ModelParams& p, std::string_view key, double v) {
    if (key == "delta_c") {
        p.delta_c = v;
        p.omega_c.reset(), p.omega_s.reset(), p.omega_d.reset();
    } else if (key == "delta_s") {
        p.delta_s = v;
        p.omega_c.reset(), p.omega_s.reset(), p.omega_d.reset();
    } else if (key == "omega_c" || key == "omega_s" || key == "omega_d") {
        double oc = p.omega_c.value_or(p.delta_c), os = p.omega_s.value_or(p.delta_s), od = p.omega_d.value_or(0.0);
        (key == "omega_c" ? oc : key == "omega_s" ? os : od) = v;
        set_frequencies(p, oc, os, od);
    } else if (key == "lambda") {
        p.lambda = v;
    } else if (key == "n_tls") {
        p.n_tls = v;
    } else if (key == "omega_a_re") {
        p.omega_a.real(v);
    } else if (key == "omega_a_im") {
        p.omega_a.imag(v);
    } else if (key == "omega_j_re") {
        p.omega_j.real(v);
    } else if (key == "omega_j_im") {
        p.omega_j.imag(v);
    } else if (key == "kappa_c") {
        p.kappa_c = v;
    } else if (key == "kappa_g") {
        p.kappa_g = v;
    } else if (key == "gamma_perp" || key == "gamma_par") {
        (key == "gamma_perp" ? p.gamma_perp : p.gamma_par) = v;
        p.gamma_p.reset(), p.gamma_h.reset();
    } else if (key == "gamma_p" || key == "gamma_h") {
        set_emitter_rates(p, key == "gamma_p" ? v : p.gamma_p.value_or(0.0), key == "gamma_h" ? v : p.gamma_h.value_or(0.0));
    } else {
        throw InputError("unknown parameter '" + std::string(key) + "'");
    }
}

}  // namespace tcqpt
