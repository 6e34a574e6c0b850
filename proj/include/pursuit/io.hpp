#pragma once

#include <Eigen/Core>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pursuit/backward.hpp"
#include "pursuit/decomposition.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/types.hpp"

namespace pursuit::io {

using json = nlohmann::json;

/// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const char* context) {
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc()) {
    throw IoError(std::string("could not parse number in ") + context + ": '" + std::string(text) + "'");
  }
  return out;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

inline std::vector<std::string_view> split_csv(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(begin));
      break;
    }
    out.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
  return out;
}

inline void fnv1a_append(std::uint64_t& hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
}

inline void fnv1a_append(std::uint64_t& hash, double v) { fnv1a_append(hash, &v, sizeof v); }

}  // namespace detail

/// FNV-1a over the atom values and the grid; identifies the exact dictionary
/// bytes a decomposition artifact was computed against.
inline std::string dictionary_hash(const Dictionary& dict) {
  std::uint64_t hash = 1469598103934665603ULL;
  const std::uint64_t count = dict.size();
  const std::uint64_t length = static_cast<std::uint64_t>(dict.atom_size());
  detail::fnv1a_append(hash, &count, sizeof count);
  detail::fnv1a_append(hash, &length, sizeof length);
  detail::fnv1a_append(hash, dict.grid_start);
  detail::fnv1a_append(hash, dict.grid_step);
  for (const Atom& a : dict.atoms) {
    detail::fnv1a_append(hash, a.values.data(), static_cast<std::size_t>(a.values.size()) * sizeof(double));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Signals and plot-ready series: CSV with a `t,value` header.
// ---------------------------------------------------------------------------

inline void write_signal_csv(const std::filesystem::path& path, const Signal& f) {
  std::ofstream out = detail::open_output(path);
  out << "t,value\n";
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    out << format_double(f.time_at(k)) << ',' << format_double(f.samples[k]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

inline Signal read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty signal file: " + path.string());
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    detail::split_csv(line, fields);
    if (fields.size() != 2) throw IoError("expected two columns in " + path.string());
    times.push_back(parse_double(fields[0], "signal time column"));
    values.push_back(parse_double(fields[1], "signal value column"));
  }
  if (values.empty()) throw IoError("signal file has no samples: " + path.string());
  Signal f;
  f.grid_start = times.front();
  f.grid_step = times.size() > 1 ? times[1] - times[0] : 1.0;
  f.samples = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  validate(f);
  return f;
}

// ---------------------------------------------------------------------------
// Dictionaries: a pure numeric CSV matrix (first column the time grid, one
// atom per column) plus a JSON sidecar with provenance and atom metadata.
// ---------------------------------------------------------------------------

inline std::filesystem::path sidecar_path(std::filesystem::path csv_path) {
  csv_path.replace_extension(".json");
  return csv_path;
}

inline void write_dictionary(const std::filesystem::path& csv_path, const Dictionary& dict) {
  validate(dict);
  std::ofstream out = detail::open_output(csv_path);
  const Eigen::Index rows = dict.atom_size();
  for (Eigen::Index k = 0; k < rows; ++k) {
    out << format_double(dict.grid_start + dict.grid_step * static_cast<double>(k));
    for (const Atom& a : dict.atoms) out << ',' << format_double(a.values[k]);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + csv_path.string());

  json side;
  side["format"] = "pursuit-dictionary";
  side["version"] = 1;
  side["provenance"] = dict.provenance;
  side["hash"] = dictionary_hash(dict);
  json meta = json::array();
  bool any_meta = false;
  for (const Atom& a : dict.atoms) {
    if (a.meta) {
      any_meta = true;
      meta.push_back({{"scale", a.meta->scale}, {"translation", a.meta->translation}});
    } else {
      meta.push_back(nullptr);
    }
  }
  if (any_meta) side["atoms"] = std::move(meta);

  std::ofstream sout = detail::open_output(sidecar_path(csv_path));
  sout << side.dump(2) << '\n';
  if (!sout) throw IoError("failed writing " + sidecar_path(csv_path).string());
}

inline Dictionary read_dictionary(const std::filesystem::path& csv_path) {
  std::ifstream in = detail::open_input(csv_path);
  std::string line;
  std::vector<double> grid;
  std::vector<std::vector<double>> columns;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    detail::split_csv(line, fields);
    if (fields.size() < 2) throw IoError("dictionary rows need a grid column and at least one atom");
    if (columns.empty()) columns.resize(fields.size() - 1);
    if (fields.size() - 1 != columns.size()) throw IoError("ragged dictionary matrix in " + csv_path.string());
    grid.push_back(parse_double(fields[0], "dictionary grid column"));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      columns[i - 1].push_back(parse_double(fields[i], "dictionary atom column"));
    }
  }
  if (grid.empty()) throw IoError("dictionary file has no rows: " + csv_path.string());

  Dictionary dict;
  dict.grid_start = grid.front();
  dict.grid_step = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  for (auto& col : columns) {
    dict.atoms.push_back(
        make_atom(Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()))));
  }

  const std::filesystem::path side_path = sidecar_path(csv_path);
  std::error_code ec;
  if (std::filesystem::exists(side_path, ec)) {
    std::ifstream sin = detail::open_input(side_path);
    json side;
    try {
      sin >> side;
    } catch (const json::exception& e) {
      throw IoError("bad dictionary sidecar " + side_path.string() + ": " + e.what());
    }
    dict.provenance = side.value("provenance", std::string());
    if (side.contains("atoms") && side["atoms"].is_array() && side["atoms"].size() == dict.atoms.size()) {
      for (std::size_t i = 0; i < dict.atoms.size(); ++i) {
        const json& m = side["atoms"][i];
        if (m.is_object()) {
          dict.atoms[i].meta = AtomMeta{m.value("scale", 0), m.value("translation", 0)};
        }
      }
    }
  }
  validate(dict);
  return dict;
}

// ---------------------------------------------------------------------------
// Decomposition artifacts: selected indices + coefficients + the dictionary
// hash. Duals are deterministic given the indices and the dictionary, so they
// are rebuilt on load instead of being serialized.
// ---------------------------------------------------------------------------

inline void write_decomposition(const std::filesystem::path& path, const Decomposition& state,
                                const Dictionary& dict, const json& config_echo) {
  json doc;
  doc["format"] = "pursuit-decomposition";
  doc["version"] = 1;
  doc["dictionary_hash"] = dictionary_hash(dict);
  doc["config"] = config_echo;
  doc["selected"] = json::array();
  for (Eigen::Index idx : state.selected) doc["selected"].push_back(idx);
  doc["coefficients"] = json::array();
  for (Eigen::Index k = 0; k < state.coefficients.size(); ++k) {
    doc["coefficients"].push_back(state.coefficients[k]);
  }
  std::ofstream out = detail::open_output(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

struct LoadedDecomposition {
  Decomposition state;
  json config_echo;
};

/// Rebuilds the decomposition (duals, basis, residual) from an artifact.
/// Refuses to proceed when the artifact's dictionary hash does not match the
/// supplied dictionary.
inline LoadedDecomposition load_decomposition(const std::filesystem::path& path, const Dictionary& dict,
                                              const Signal& f,
                                              double dependence_eps = kDefaultDependenceEps) {
  std::ifstream in = detail::open_input(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("bad decomposition artifact " + path.string() + ": " + e.what());
  }
  if (doc.value("format", std::string()) != "pursuit-decomposition") {
    throw IoError("not a decomposition artifact: " + path.string());
  }
  if (doc.value("dictionary_hash", std::string()) != dictionary_hash(dict)) {
    throw IoError("decomposition artifact was computed against a different dictionary");
  }
  if (!doc.contains("selected") || !doc.contains("coefficients") ||
      doc["selected"].size() != doc["coefficients"].size()) {
    throw IoError("malformed decomposition artifact: " + path.string());
  }

  LoadedDecomposition out;
  out.config_echo = doc.value("config", json::object());
  for (const json& idx : doc["selected"]) {
    append_atom(out.state, dict, idx.get<Eigen::Index>(), dependence_eps);
  }
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(doc["coefficients"].size()));
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs[k] = doc["coefficients"][static_cast<std::size_t>(k)].get<double>();
  }
  out.state.coefficients = std::move(coeffs);
  update_residual(out.state, dict, f);
  return out;
}

// ---------------------------------------------------------------------------
// Run reports and auxiliary CSV outputs.
// ---------------------------------------------------------------------------

struct RunReport {
  json config;
  std::vector<double> forward_residual_history;
  DeletionTrace trace;
  double forward_residual_norm = -1.0;   // negative when the stage did not run
  double backward_residual_norm = -1.0;
  double elapsed_seconds = 0.0;
};

inline json coefficient_table(const Decomposition& state, const Dictionary& dict) {
  json rows = json::array();
  for (std::size_t n = 0; n < state.size(); ++n) {
    const std::size_t idx = static_cast<std::size_t>(state.selected[n]);
    json row;
    row["index"] = state.selected[n];
    row["coefficient"] = state.coefficients[static_cast<Eigen::Index>(n)];
    if (idx < dict.size() && dict.atoms[idx].meta) {
      row["scale"] = dict.atoms[idx].meta->scale;
      row["translation"] = dict.atoms[idx].meta->translation;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const RunReport& report, const Decomposition& state, const Dictionary& dict) {
  json doc;
  doc["config"] = report.config;
  doc["forward_residual_history"] = report.forward_residual_history;
  json trace = json::array();
  for (const DeletionStep& step : report.trace) {
    trace.push_back({{"selected_position", step.selected_position},
                     {"dictionary_index", step.dictionary_index},
                     {"criterion_value", step.criterion_value},
                     {"residual_norm_after", step.residual_norm_after}});
  }
  doc["deletion_trace"] = std::move(trace);
  doc["coefficients"] = coefficient_table(state, dict);
  if (report.forward_residual_norm >= 0.0) doc["forward_residual_norm"] = report.forward_residual_norm;
  if (report.backward_residual_norm >= 0.0) doc["backward_residual_norm"] = report.backward_residual_norm;
  doc["elapsed_seconds"] = report.elapsed_seconds;
  return doc;
}

inline void write_report(const std::filesystem::path& path, const RunReport& report,
                         const Decomposition& state, const Dictionary& dict) {
  std::ofstream out = detail::open_output(path);
  out << to_json(report, state, dict).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

inline void write_coefficients_csv(const std::filesystem::path& path, const Decomposition& state,
                                   const Dictionary& dict) {
  std::ofstream out = detail::open_output(path);
  out << "index,scale,translation,coefficient\n";
  for (std::size_t n = 0; n < state.size(); ++n) {
    const std::size_t idx = static_cast<std::size_t>(state.selected[n]);
    out << state.selected[n] << ',';
    if (idx < dict.size() && dict.atoms[idx].meta) {
      out << dict.atoms[idx].meta->scale << ',' << dict.atoms[idx].meta->translation;
    } else {
      out << ',';
    }
    out << ',' << format_double(state.coefficients[static_cast<Eigen::Index>(n)]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

inline void write_trace_csv(const std::filesystem::path& path, const DeletionTrace& trace) {
  std::ofstream out = detail::open_output(path);
  out << "step,selected_position,dictionary_index,criterion_value,residual_norm_after\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << trace[i].selected_position << ',' << trace[i].dictionary_index << ','
        << format_double(trace[i].criterion_value) << ',' << format_double(trace[i].residual_norm_after) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace pursuit::io
