// SPDX-License-Identifier: Apache-2.0
//
// File formats: flat key=value configuration, plot-ready CSV outputs, and a
// JSON Monte Carlo summary. Output files are written whole-or-not-at-all.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dopseek/channel.hpp"
#include "dopseek/harness.hpp"
#include "dopseek/seeker.hpp"
#include "dopseek/world.hpp"

namespace dopseek {

/// Compact, round-trippable decimal text; NaN prints as "nan".
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string trajectory_csv(const EpisodeLog& log) {
    std::string out = "t,x,y,d,phi,theta_k,theta_star,omega_tilde,accepted,rss\n";
    for (const auto& r : log.records) {
        out += fmt_double(r.t);
        out += ',';
        out += fmt_double(r.x);
        out += ',';
        out += fmt_double(r.y);
        out += ',';
        out += fmt_double(r.d);
        out += ',';
        out += fmt_double(r.phi);
        out += ',';
        out += fmt_double(r.theta_k);
        out += ',';
        out += fmt_double(r.theta_star);
        out += ',';
        out += fmt_double(r.omega_tilde);
        out += ',';
        out += r.accepted ? '1' : '0';
        out += ',';
        out += fmt_double(r.rss);
        out += '\n';
    }
    return out;
}

inline std::string histogram_csv(const McSummary& s) {
    std::string out = "bin_low,bin_high,count\n";
    for (const auto& b : s.histogram) {
        out += fmt_double(b.lo);
        out += ',';
        out += fmt_double(b.hi);
        out += ',';
        out += std::to_string(b.count);
        out += '\n';
    }
    return out;
}

inline std::string convergence_csv(std::span<const double> trace) {
    std::string out = "k,theta_err\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += fmt_double(trace[k]);
        out += '\n';
    }
    return out;
}

inline std::string capture_csv(const BeaconCapture& cap) {
    std::string out = "index,real,imag\n";
    for (std::size_t i = 0; i < cap.samples.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += fmt_double(cap.samples[i].real());
        out += ',';
        out += fmt_double(cap.samples[i].imag());
        out += '\n';
    }
    return out;
}

inline nlohmann::json summary_json(const McSummary& s) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& b : s.histogram)
        hist.push_back({{"bin_low", b.lo}, {"bin_high", b.hi}, {"count", b.count}});
    return nlohmann::json{
        {"runs", s.runs},
        {"successes", s.successes},
        {"success_rate", s.success_rate},
        {"mean_distance", s.mean_distance},
        {"median_distance", s.median_distance},
        {"std_distance", s.std_distance},
        {"mean_ratio", s.mean_ratio},
        {"shortest_path", s.shortest_path},
        {"bin_width", s.bin_width},
        {"histogram", hist},
    };
}

/// Write the whole file or nothing: write a temp sibling, then rename.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place: " + path.string());
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view key, std::string_view value) {
    try {
        std::size_t used = 0;
        const std::string v(value);
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + std::string(key) +
                                    "': '" + std::string(value) + "'");
    }
}

inline int parse_int(std::string_view key, std::string_view value) {
    const double x = parse_number(key, value);
    const int i = static_cast<int>(std::llround(x));
    if (std::abs(x - i) > 1e-9)
        throw std::invalid_argument("config: '" + std::string(key) + "' must be an integer");
    return i;
}

}  // namespace detail

/// Apply "key = value" settings to a scenario and seeker configuration.
/// Lines may be blank or start with '#'. Angles are given in degrees.
/// Unknown keys are errors.
inline void apply_config_text(std::string_view text, Scenario& sc, SeekerConfig& cfg) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));

        if (key == "d_init") sc.d_init = detail::parse_number(key, value);
        else if (key == "R") sc.R = detail::parse_number(key, value);
        else if (key == "R_in") sc.R_in = detail::parse_number(key, value);
        else if (key == "L") sc.L = detail::parse_int(key, value);
        else if (key == "f_c") sc.f_c = detail::parse_number(key, value);
        else if (key == "v") sc.v = detail::parse_number(key, value);
        else if (key == "c") sc.c = detail::parse_number(key, value);
        else if (key == "sigma_n2_db") sc.sigma_n2_db = detail::parse_number(key, value);
        else if (key == "snr_init_db") sc.snr_init_db = detail::parse_number(key, value);
        else if (key == "d_v") sc.d_v = detail::parse_number(key, value);
        else if (key == "T_slot") sc.T_slot = detail::parse_number(key, value);
        else if (key == "T_s") sc.T_s = detail::parse_number(key, value);
        else if (key == "N") sc.N = detail::parse_int(key, value);
        else if (key == "N_fft") sc.N_fft = detail::parse_int(key, value);
        else if (key == "sigma_phi_deg") sc.sigma_phi = deg2rad(detail::parse_number(key, value));
        else if (key == "cfo_drift_rate_std") sc.cfo_drift_rate_std = detail::parse_number(key, value);
        else if (key == "cfo_init_range") sc.cfo_init_range = detail::parse_number(key, value);
        else if (key == "sigma_omega_abstract") sc.sigma_omega_abstract = detail::parse_number(key, value);
        else if (key == "max_turn_rate_deg_s") sc.max_turn_rate = deg2rad(detail::parse_number(key, value));
        else if (key == "delta_deg") cfg.delta = deg2rad(detail::parse_number(key, value));
        else if (key == "M") cfg.M = detail::parse_int(key, value);
        else if (key == "smoothing_len") cfg.smoothing_len = detail::parse_int(key, value);
        else if (key == "R_c") cfg.R_c = detail::parse_number(key, value);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

inline void load_config_file(const std::filesystem::path& path, Scenario& sc, SeekerConfig& cfg) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    apply_config_text(buf.str(), sc, cfg);
}

/// Recompute the seeker fields that are fixed by scenario constants.
inline void sync_seeker_constants(const Scenario& sc, SeekerConfig& cfg) {
    cfg.f_d_max = sc.f_d_max();
    cfg.outlier_threshold = 2.0 * kTwoPi * sc.f_d_max();
}

}  // namespace dopseek
