#pragma once

// Comma-separated files: drive cycles (time_s,speed_mps), per-vehicle
// trajectories and step-response trials (time_s,accel_mps2).
//
// Numbers are written in the shortest form that reads back bit-identically.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "evcacc/errors.hpp"
#include "evcacc/platoon_sim.hpp"
#include "evcacc/sysid.hpp"

namespace evcacc {

inline std::string format_number(double x) {
    if (std::isnan(x)) return {};
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Empty cells read as NaN.
inline double parse_cell(std::string_view cell, const std::string& where) {
    cell = trim(cell);
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw ConfigError(where + ": not a number: '" + std::string(cell) + "'");
    }
    return v;
}

// Rows of numeric cells under an exact header.
inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                         std::string_view header) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || trim(line) != header) {
        throw ConfigError(path.string() + ":1: expected header '" + std::string(header) + "'");
    }
    const std::size_t columns = split_commas(header).size();
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (cells.size() != columns) {
            throw ConfigError(where + ": expected " + std::to_string(columns) + " columns");
        }
        std::vector<double> row;
        row.reserve(columns);
        for (std::string_view c : cells) row.push_back(parse_cell(c, where));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

struct SpeedSeries {
    std::vector<double> time;  // s
    std::vector<double> speed; // m/s
};

inline SpeedSeries read_speed_csv(const std::filesystem::path& path) {
    SpeedSeries s;
    for (const auto& row : detail::read_numeric_csv(path, "time_s,speed_mps")) {
        if (std::isnan(row[0]) || std::isnan(row[1])) throw ConfigError(path.string() + ": empty cell");
        s.time.push_back(row[0]);
        s.speed.push_back(row[1]);
    }
    return s;
}

inline constexpr std::string_view kTrajectoryHeader = "t,x,v,a,u,mode,e1,e2,e3,r1,r2,P,power_w";

inline void write_trajectory(const std::filesystem::path& path, const SimulationLog& log, std::size_t vehicle) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string() + ": cannot write");
    const VehicleTrace& tr = log.vehicles.at(vehicle);
    out << kTrajectoryHeader << '\n';
    for (std::size_t k = 0; k < log.time.size(); ++k) {
        out << format_number(log.time[k]) << ',' << format_number(tr.x[k]) << ',' << format_number(tr.v[k]) << ','
            << format_number(tr.a[k]) << ',' << format_number(tr.u[k]) << ',' << to_string(tr.mode[k]);
        if (tr.has_errors) {
            for (const auto* s : {&tr.e1, &tr.e2, &tr.e3, &tr.r1, &tr.r2, &tr.P}) out << ',' << format_number((*s)[k]);
        } else {
            out << ",,,,,,";
        }
        out << ',' << format_number(tr.power[k]) << '\n';
    }
    if (!out) throw NumericError(path.string() + ": write failed");
}

struct TrajectoryFile {
    std::vector<double> time;
    VehicleTrace trace;
};

inline TrajectoryFile read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kTrajectoryHeader) {
        throw ConfigError(path.string() + ":1: expected header '" + std::string(kTrajectoryHeader) + "'");
    }
    TrajectoryFile f;
    VehicleTrace& tr = f.trace;
    std::size_t lineno = 1;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_commas(line);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (cells.size() != 13) throw ConfigError(where + ": expected 13 columns");
        f.time.push_back(detail::parse_cell(cells[0], where));
        tr.x.push_back(detail::parse_cell(cells[1], where));
        tr.v.push_back(detail::parse_cell(cells[2], where));
        tr.a.push_back(detail::parse_cell(cells[3], where));
        tr.u.push_back(detail::parse_cell(cells[4], where));
        tr.mode.push_back(drive_mode_from_string(detail::trim(cells[5])));
        const bool errors = !detail::trim(cells[6]).empty();
        if (first) tr.has_errors = errors;
        first = false;
        if (errors != tr.has_errors) throw ConfigError(where + ": error columns present on some rows only");
        if (tr.has_errors) {
            std::size_t c = 6;
            for (auto* s : {&tr.e1, &tr.e2, &tr.e3, &tr.r1, &tr.r2, &tr.P}) s->push_back(detail::parse_cell(cells[c++], where));
        }
        tr.power.push_back(detail::parse_cell(cells[12], where));
    }
    return f;
}

// Rebuilds a log from trajectory files, enough for the metrics.
inline SimulationLog read_trajectories(const std::vector<std::filesystem::path>& files) {
    SimulationLog log;
    for (const auto& p : files) {
        TrajectoryFile f = read_trajectory(p);
        if (log.time.empty()) {
            log.time = f.time;
            if (log.time.size() >= 2) log.dt = log.time[1] - log.time[0];
        } else if (f.time != log.time) {
            throw ConfigError(p.string() + ": time grid differs from the first file");
        }
        log.vehicles.push_back(std::move(f.trace));
    }
    return log;
}

inline void write_trial_csv(const std::filesystem::path& path, const StepTrial& trial) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string() + ": cannot write");
    out << "time_s,accel_mps2\n";
    for (std::size_t k = 0; k < trial.samples.size(); ++k) {
        out << format_number(trial.dt * static_cast<double>(k)) << ',' << format_number(trial.samples[k]) << '\n';
    }
}

// Samples must sit on a uniform grid starting at t = 0.
inline StepTrial read_trial_csv(const std::filesystem::path& path, double command, TrialMode mode) {
    const auto rows = detail::read_numeric_csv(path, "time_s,accel_mps2");
    if (rows.size() < 2) throw ConfigError(path.string() + ": need at least two samples");
    StepTrial trial;
    trial.command_magnitude = command;
    trial.mode = mode;
    trial.dt = rows[1][0] - rows[0][0];
    if (rows[0][0] != 0.0 || !(trial.dt > 0)) throw ConfigError(path.string() + ": time must start at 0 and increase");
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double expected = trial.dt * static_cast<double>(k);
        if (std::abs(rows[k][0] - expected) > 1e-9 * (1.0 + expected)) {
            throw ConfigError(path.string() + ":" + std::to_string(k + 2) + ": sampling grid is not uniform");
        }
        if (std::isnan(rows[k][1])) throw ConfigError(path.string() + ":" + std::to_string(k + 2) + ": empty cell");
        trial.samples.push_back(rows[k][1]);
    }
    return trial;
}

} // namespace evcacc
