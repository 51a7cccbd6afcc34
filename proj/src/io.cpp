#include "fockcat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fockcat::io {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

double parse_number(const std::string& field, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && *begin == ' ') ++begin;
  if (begin < end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": malformed number '" + field + "'");
  }
  return v;
}

// Reads a CSV with a fixed header into rows of doubles.
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path, const std::vector<std::string>& header) {
  auto in = open_in(path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(path.string() + ":1: missing header");
  if (split_commas(strip_cr(line)) != header) {
    std::string expected;
    for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
    throw ParseError(path.string() + ":1: expected header '" + expected + "'");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, path, line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
void read_key(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

json density_to_json(const DensityMatrix& rho) {
  const auto d = rho.dim();
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < d; ++i) {
    json r = json::array();
    json m = json::array();
    for (int k = 0; k < d; ++k) {
      r.push_back(rho(i, k).real());
      m.push_back(rho(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(m));
  }
  return json{{"truncation", rho.truncation()}, {"modes", rho.modes()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix density_from_json(const json& j) {
  try {
    const int n = j.at("truncation").get<int>();
    const int modes = j.at("modes").get<int>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto d = static_cast<Eigen::Index>(re.size());
    if (static_cast<Eigen::Index>(im.size()) != d) throw DimensionError("density JSON: re/im row counts differ");
    CMatrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& rr = re.at(static_cast<std::size_t>(i));
      const auto& ir = im.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(rr.size()) != d || static_cast<Eigen::Index>(ir.size()) != d) {
        throw DimensionError("density JSON: matrix is not square");
      }
      for (Eigen::Index k = 0; k < d; ++k) {
        m(i, k) = Complex(rr.at(static_cast<std::size_t>(k)).get<double>(), ir.at(static_cast<std::size_t>(k)).get<double>());
      }
    }
    return DensityMatrix(std::move(m), modes, n);
  } catch (const json::exception& e) {
    throw ParseError(std::string("density JSON: ") + e.what());
  }
}

void write_wigner_csv(const fs::path& path, const WignerGrid& grid) {
  auto out = open_out(path);
  out << "x,p,w\n";
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      out << format_double(grid.x_axis[i]) << ',' << format_double(grid.p_axis[j]) << ','
          << format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
    }
  }
}

void write_sweep_csv(const fs::path& path, const SweepResult& sweep) {
  auto out = open_out(path);
  out << "R,fidelity,alpha,z,squeezing_db\n";
  for (const auto& row : sweep.rows) {
    const ScssParams p{row.alpha, row.z, Parity::odd};
    out << format_double(row.reflectivity) << ',' << format_double(row.fidelity) << ',' << format_double(row.alpha)
        << ',' << format_double(row.z) << ',' << format_double(p.squeezing_db()) << '\n';
  }
}

SweepResult read_sweep_csv(const fs::path& path) {
  SweepResult out;
  for (const auto& r : read_numeric_csv(path, {"R", "fidelity", "alpha", "z", "squeezing_db"})) {
    out.rows.push_back(SweepRow{r[0], r[1], r[2], r[3]});
  }
  return out;
}

void write_quadratures_csv(const fs::path& path, const std::vector<QuadratureRecord>& records) {
  auto out = open_out(path);
  out << "x,theta\n";
  for (const auto& r : records) out << format_double(r.x) << ',' << format_double(r.theta) << '\n';
}

std::vector<QuadratureRecord> read_quadratures_csv(const fs::path& path) {
  std::vector<QuadratureRecord> out;
  for (const auto& r : read_numeric_csv(path, {"x", "theta"})) out.push_back({r[0], r[1]});
  return out;
}

void write_decay_csv(const fs::path& path, const std::vector<std::pair<int, double>>& points) {
  auto out = open_out(path);
  out << "n_stor,fidelity\n";
  for (const auto& [n, f] : points) out << n << ',' << format_double(f) << '\n';
}

std::vector<std::pair<int, double>> read_decay_csv(const fs::path& path) {
  std::vector<std::pair<int, double>> out;
  std::size_t line = 1;
  for (const auto& r : read_numeric_csv(path, {"n_stor", "fidelity"})) {
    ++line;
    if (r[0] != std::floor(r[0])) {
      throw ParseError(path.string() + ": row " + std::to_string(line) + ": n_stor must be an integer");
    }
    out.emplace_back(static_cast<int>(r[0]), r[1]);
  }
  return out;
}

std::size_t validate_csv(const fs::path& path, const std::vector<std::string>& header) {
  return read_numeric_csv(path, header).size();
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"eta", c.eta},
              {"eta_f", c.eta_f},
              {"eta_apd", c.eta_apd},
              {"single_click_rate", c.single_click_rate},
              {"double_click_rate", c.double_click_rate},
              {"f_pump", c.f_pump},
              {"eta_prop", c.eta_prop},
              {"eta_qmc", c.eta_qmc},
              {"n_stor_min", c.n_stor_min},
              {"n_stor_max", c.n_stor_max},
              {"r_hd", c.r_hd},
              {"truncation", c.truncation},
              {"herald_halfwidth", c.herald_halfwidth},
              {"tmsv_phase", c.tmsv_phase},
              {"reflectivity", c.reflectivity}};
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  static const std::vector<std::string> meta = {"profile", "version", "description"};
  const json known = config_to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key) && std::find(meta.begin(), meta.end(), key) == meta.end()) {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  try {
    read_key(j, "eta", c.eta);
    read_key(j, "eta_f", c.eta_f);
    read_key(j, "eta_apd", c.eta_apd);
    read_key(j, "single_click_rate", c.single_click_rate);
    read_key(j, "double_click_rate", c.double_click_rate);
    read_key(j, "f_pump", c.f_pump);
    read_key(j, "eta_prop", c.eta_prop);
    read_key(j, "eta_qmc", c.eta_qmc);
    read_key(j, "n_stor_min", c.n_stor_min);
    read_key(j, "n_stor_max", c.n_stor_max);
    read_key(j, "r_hd", c.r_hd);
    read_key(j, "truncation", c.truncation);
    read_key(j, "herald_halfwidth", c.herald_halfwidth);
    read_key(j, "tmsv_phase", c.tmsv_phase);
    read_key(j, "reflectivity", c.reflectivity);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

fs::path config_directory() {
  if (const char* env = std::getenv("FOCKCAT_CONFIG_DIR"); env && *env) return fs::path(env);
#ifdef FOCKCAT_DEFAULT_CONFIG_DIR
  return fs::path(FOCKCAT_DEFAULT_CONFIG_DIR);
#else
  return fs::path("config");
#endif
}

ResolvedConfig load_config(const std::string& spec) {
  fs::path path(spec);
  std::string profile = spec;
  const bool looks_like_name = path.extension().empty() && !path.has_parent_path();
  if (looks_like_name) {
    path = config_directory() / (spec + ".json");
  }
  if (!fs::is_regular_file(path)) {
    throw ParseError("config not found: " + path.string());
  }
  const json j = read_json(path);
  ResolvedConfig out{config_from_json(j), looks_like_name ? profile : path.string(), path};
  out.config.validate();
  return out;
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json manifest_to_json(const RunManifest& m) {
  return json{{"command", m.command},   {"arguments", m.arguments}, {"config_profile", m.config_profile},
              {"seed", m.seed},         {"inputs", m.inputs},       {"outputs", m.outputs},
              {"tool_version", m.tool_version}, {"wall_seconds", m.wall_seconds}};
}

fs::path write_manifest(const RunManifest& m) {
  if (m.outputs.empty()) throw Error("write_manifest: no outputs to describe");
  const fs::path target = m.outputs.front() + ".manifest.json";
  write_json(target, manifest_to_json(m));
  return target;
}

}  // namespace fockcat::io
