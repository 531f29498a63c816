/**
 * @file run_log.hpp
 * @brief Per-update records of an experiment and their CSV persistence.
 *
 * Main file columns: t,E,c_1..c_n,param_err,flags. The optional dense
 * companion file (`<stem>_dense.csv`) holds t,obs_err. Floats are written in
 * shortest round-trip form, so reading a file back reproduces every value.
 */
#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cda/errors.hpp"

namespace cda {

struct UpdateRecord {
  double time = 0.0;
  double error = 0.0;                ///< E at the update time, before the update
  std::vector<double> params;        ///< c after the update
  double param_error = 0.0;          ///< |c - gamma|
  bool skipped = false;
  bool clamped = false;

  friend bool operator==(const UpdateRecord&, const UpdateRecord&) = default;
};

struct DenseSample {
  double time = 0.0;
  double observed_error = 0.0;  ///< |I_h(v - u)|

  friend bool operator==(const DenseSample&, const DenseSample&) = default;
};

struct RunLog {
  std::size_t param_count = 0;
  std::vector<UpdateRecord> records;
  std::vector<DenseSample> dense;

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw IoError("cannot format value");
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings on some libraries; fall back.
    try {
      std::size_t used = 0;
      x = std::stod(s, &used);
      if (used != s.size()) throw IoError("bad number '" + s + "'");
    } catch (const std::logic_error&) {
      throw IoError("bad number '" + s + "'");
    }
  }
  return x;
}

inline std::string flags_string(const UpdateRecord& r) {
  if (r.skipped && r.clamped) return "skipped+clamped";
  if (r.skipped) return "skipped";
  if (r.clamped) return "clamped";
  return "none";
}

inline std::filesystem::path dense_companion_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_filename(path.stem().string() + "_dense.csv");
  return p;
}

inline void write_run_log(const RunLog& log, const std::filesystem::path& path,
                          bool write_dense = true) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "t,E";
  for (std::size_t i = 1; i <= log.param_count; ++i) out << ",c_" << i;
  out << ",param_err,flags\n";
  for (const auto& r : log.records) {
    if (r.params.size() != log.param_count) throw IoError("record has wrong parameter count");
    out << format_double(r.time) << ',' << format_double(r.error);
    for (double c : r.params) out << ',' << format_double(c);
    out << ',' << format_double(r.param_error) << ',' << flags_string(r) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());

  if (write_dense && !log.dense.empty()) {
    std::ofstream d(dense_companion_path(path));
    if (!d) throw IoError("cannot open dense companion file");
    d << "t,obs_err\n";
    for (const auto& s : log.dense) {
      d << format_double(s.time) << ',' << format_double(s.observed_error) << '\n';
    }
    if (!d) throw IoError("write failed: dense companion file");
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline RunLog read_run_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  const auto header = detail::split_csv(line);
  if (header.size() < 4 || header[0] != "t" || header[1] != "E" ||
      header[header.size() - 2] != "param_err" || header.back() != "flags") {
    throw IoError("unexpected header in " + path.string());
  }
  RunLog log;
  log.param_count = header.size() - 4;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != header.size()) throw IoError("ragged row in " + path.string());
    UpdateRecord r;
    r.time = parse_double(cells[0]);
    r.error = parse_double(cells[1]);
    for (std::size_t i = 0; i < log.param_count; ++i) r.params.push_back(parse_double(cells[2 + i]));
    r.param_error = parse_double(cells[2 + log.param_count]);
    const std::string& flags = cells.back();
    r.skipped = flags.find("skipped") != std::string::npos;
    r.clamped = flags.find("clamped") != std::string::npos;
    log.records.push_back(std::move(r));
  }

  const auto dense_path = dense_companion_path(path);
  if (std::filesystem::exists(dense_path)) {
    std::ifstream d(dense_path);
    std::getline(d, line);
    while (std::getline(d, line)) {
      if (line.empty()) continue;
      const auto cells = detail::split_csv(line);
      if (cells.size() != 2) throw IoError("ragged row in dense companion file");
      log.dense.push_back({parse_double(cells[0]), parse_double(cells[1])});
    }
  }
  return log;
}

}  // namespace cda
