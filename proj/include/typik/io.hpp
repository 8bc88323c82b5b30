#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "typik/contour.hpp"
#include "typik/dataset.hpp"

#include "json.hpp"

namespace typik {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trippable decimal form; output is deterministic across
// runs and thread counts.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

inline bool parse_number(const std::string& s, double& v) {
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

// Dataset ingestion: scalar_sample / vector_observation read one numeric
// column, paired_sample reads two (x_i1, x_i2).  Lines starting with '#' are
// skipped; an optional header row is dropped when has_header is set.
inline Dataset read_dataset_csv(const std::string& path, DataShape shape,
                                bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<double> values;
  std::string line;
  bool header_pending = has_header;
  std::size_t lineno = 0;
  const std::size_t want = shape == DataShape::paired_sample ? 2u : 1u;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < want)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(want) + " column(s)");
    for (std::size_t c = 0; c < want; ++c) {
      double v = 0.0;
      if (!detail::parse_number(fields[c], v))
        throw IoError(path + ":" + std::to_string(lineno) +
                      ": not a number: " + fields[c]);
      values.push_back(v);
    }
  }
  if (values.empty()) throw IoError(path + ": no data rows");
  switch (shape) {
    case DataShape::scalar_sample: return Dataset::scalar(std::move(values));
    case DataShape::paired_sample: return Dataset::paired(std::move(values));
    case DataShape::vector_observation:
      return Dataset::vector_obs(std::move(values));
  }
  throw std::logic_error("read_dataset_csv: unreachable");
}

// ContourGrid files: CSV with columns coord_1..coord_d, tau plus a JSON
// sidecar carrying the regeneration metadata.
inline std::string contour_csv(const ContourGrid& cg) {
  std::ostringstream out;
  const std::size_t dim = cg.grid.empty() ? 0 : cg.grid.front().coords.size();
  for (std::size_t c = 0; c < dim; ++c) out << "coord_" << (c + 1) << ",";
  out << "tau\n";
  for (std::size_t i = 0; i < cg.grid.size(); ++i) {
    for (double v : cg.grid[i].coords) out << format_double(v) << ",";
    out << format_double(cg.tau[i]) << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json contour_sidecar(const ContourGrid& cg) {
  nlohmann::ordered_json j;
  j["model_id"] = model_name(cg.model_id);
  j["lambda"] = cg.lambda;
  j["M"] = cg.mc_samples;
  j["master_seed"] = cg.master_seed;
  j["warnings"] = cg.warnings;
  j["grid_points"] = cg.grid.size();
  j["estimator_index"] = cg.estimator_index;
  return j;
}

inline void write_contour(const ContourGrid& cg, const std::string& csv_path) {
  write_text_file(csv_path, contour_csv(cg));
  std::string sidecar = csv_path;
  const auto dot = sidecar.rfind(".csv");
  if (dot != std::string::npos && dot == sidecar.size() - 4)
    sidecar = sidecar.substr(0, dot);
  sidecar += ".json";
  write_text_file(sidecar, contour_sidecar(cg).dump(2) + "\n");
}

}  // namespace typik
