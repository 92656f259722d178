#pragma once

// CSV and metadata output of sweep results.
//
// Each branch goes to <dir>/<result>_<branch>.csv; the parameter program goes
// to <dir>/<result>.meta in the configuration format, so that every row can be
// rebuilt from the metadata and its sweep value.

#include <array>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tcqpt/config.hpp"
#include "tcqpt/error.hpp"
#include "tcqpt/sweep.hpp"

namespace tcqpt {

inline constexpr std::string_view kCodeVersion = "0.1.0";

inline constexpr std::array<std::string_view, 10> kMetaKeys = {
    "name", "regime", "drive_factor", "gain_factor", "sweep_param", "points", "value_start", "value_end", "code_version", "figure"};

inline std::string csv_header(bool with_fold) {
    std::string h = "value,jz,jm_re,jm_im,a_re,a_im,n_phot,F,stability,residual_norm";
    if (with_fold) h += ",fold";
    return h + "\n";
}

inline std::string csv_row(const BranchRow& r, bool with_fold) {
    const auto& s = r.state;
    std::string line;
    for (double v : {r.value, s.jz, s.jm.real(), s.jm.imag(), s.a_mean.real(), s.a_mean.imag(), photon_number(s), spin_length(s)})
        line += format_double(v) + ",";
    line += r.stability + "," + format_double(r.residual_norm);
    if (with_fold) line += r.fold ? ",1" : ",0";
    return line + "\n";
}

inline std::string format_branch_csv(const Branch& b) {
    std::string out = csv_header(b.has_fold_column);
    for (const auto& r : b.rows) out += csv_row(r, b.has_fold_column);
    return out;
}

inline KeyValues result_metadata(const SweepResult& r) {
    KeyValues kv = to_key_values(r.program.base);
    kv["name"] = r.name;
    kv["regime"] = r.program.regime ? std::string(to_string(*r.program.regime)) : "none";
    kv["drive_factor"] = format_double(r.program.drive_factor);
    kv["gain_factor"] = format_double(r.program.gain_factor);
    kv["sweep_param"] = r.program.sweep_param;
    kv["points"] = std::to_string(r.values.size());
    if (!r.values.empty()) {
        kv["value_start"] = format_double(r.values.front());
        kv["value_end"] = format_double(r.values.back());
    }
    kv["code_version"] = std::string(kCodeVersion);
    for (const auto& [k, v] : r.extra_meta) kv[k] = v;
    return kv;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    out << text;
    out.flush();
    if (!out) throw Error("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

/// Writes the metadata sidecar and one CSV per branch; returns the paths.
inline std::vector<std::filesystem::path> export_result(const SweepResult& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> files;
    files.push_back(dir / (r.name + ".meta"));
    write_text_file(files.back(), format_key_values(result_metadata(r)));
    for (const auto& b : r.branches) {
        files.push_back(dir / (r.name + "_" + b.name + ".csv"));
        write_text_file(files.back(), format_branch_csv(b));
    }
    return files;
}

struct RunMetadata {
    ParamProgram program;
    KeyValues extra;  // every non-model key as written
};

inline RunMetadata parse_metadata(std::string_view text) {
    const KeyValues kv = parse_key_values(text);
    RunMetadata m;
    m.program.base = params_from_key_values(kv, kMetaKeys);
    for (const auto& [k, v] : kv)
        if (!is_model_key(k)) m.extra[k] = v;
    auto get = [&](const char* k) -> std::optional<std::string> {
        auto it = kv.find(k);
        return it == kv.end() ? std::nullopt : std::optional(it->second);
    };
    if (auto r = get("regime"); r && *r != "none") m.program.regime = parse_regime(*r);
    if (auto v = get("drive_factor")) m.program.drive_factor = parse_double(*v, "drive_factor");
    if (auto v = get("gain_factor")) m.program.gain_factor = parse_double(*v, "gain_factor");
    if (auto v = get("sweep_param")) m.program.sweep_param = *v;
    return m;
}

inline RunMetadata read_metadata(const std::filesystem::path& path) { return parse_metadata(read_text_file(path.string())); }

}  // namespace tcqpt
