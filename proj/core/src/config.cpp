// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "lidar_odom/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lidar_odom {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
    // std::from_chars for double is available in libstdc++ 11
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw std::invalid_argument("config: bad number for '" + std::string(key) + "': '" +
                                    std::string(value) + "'");
    }
    return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw std::invalid_argument("config: bad count for '" + std::string(key) + "': '" +
                                    std::string(value) + "'");
    }
    return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
    if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "off" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: bad flag for '" + std::string(key) + "': '" +
                                std::string(value) + "'");
}

void require(bool ok, const char *what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
}

}  // namespace

void Config::validate() const {
    require(tau_0 > 0.0, "tau_0 must be > 0");
    require(delta_min >= 0.0, "delta_min must be >= 0");
    require(n_max >= 1, "n_max must be >= 1");
    require(voxel_scale > 0.0, "voxel_scale must be > 0");
    require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
    require(beta >= 1.0 && beta <= 2.0, "beta must be in [1, 2]");
    require(gamma > 0.0, "gamma must be > 0");
    require(r_min >= 0.0 && r_min < r_max, "need 0 <= r_min < r_max");
    require(dt > 0.0, "dt must be > 0");
    require(max_iterations >= 1, "max_iterations must be >= 1");
}

void Config::set(std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "tau_0") tau_0 = parse_double(key, value);
    else if (key == "delta_min") delta_min = parse_double(key, value);
    else if (key == "n_max") n_max = parse_count(key, value);
    else if (key == "voxel_scale") voxel_scale = parse_double(key, value);
    else if (key == "alpha") alpha = parse_double(key, value);
    else if (key == "beta") beta = parse_double(key, value);
    else if (key == "gamma") gamma = parse_double(key, value);
    else if (key == "r_max") r_max = parse_double(key, value);
    else if (key == "r_min") r_min = parse_double(key, value);
    else if (key == "dt") dt = parse_double(key, value);
    else if (key == "deskew_enabled") deskew_enabled = parse_flag(key, value);
    else if (key == "max_iterations") max_iterations = parse_count(key, value);
    else if (key == "kernel_scale_mode") {
        if (value == "sigma_over_3") kernel_scale_mode = KernelScaleMode::kSigmaOverThree;
        else if (value == "sigma_over_3_squared")
            kernel_scale_mode = KernelScaleMode::kSigmaOverThreeSquared;
        else
            throw std::invalid_argument("config: kernel_scale_mode must be sigma_over_3 or "
                                        "sigma_over_3_squared");
    } else if (key == "deskew_reference") {
        if (value == "start") deskew_reference = DeskewReference::kSweepStart;
        else if (value == "mid") deskew_reference = DeskewReference::kMidSweep;
        else throw std::invalid_argument("config: deskew_reference must be start or mid");
    } else {
        throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
    }
}

Config parse_config(std::string_view text, Config base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value");
        }
        try {
            base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " +
                                        e.what());
        }
    }
    return base;
}

Config load_config(const std::filesystem::path &path, Config base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), base);
}

std::string to_string(KernelScaleMode mode) {
    return mode == KernelScaleMode::kSigmaOverThree ? "sigma_over_3" : "sigma_over_3_squared";
}

std::string to_string(DeskewReference reference) {
    return reference == DeskewReference::kSweepStart ? "start" : "mid";
}

}  // namespace lidar_odom
