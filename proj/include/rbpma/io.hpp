#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rbpma/admm.hpp"
#include "rbpma/errors.hpp"
#include "rbpma/sbm.hpp"

namespace rbpma {

/// 17 significant digits: enough to reproduce any double exactly on re-read.
inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

namespace detail {

inline std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.push_back("");
  return fields;
}

inline double parse_double(const std::string& field, const std::string& where) {
  const std::string s = strip(field);
  if (s.empty()) throw IoError(where + ": empty field");
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw IoError(where + ": cannot parse '" + s + "'");
  return value;
}

inline long parse_long(const std::string& field, const std::string& where) {
  const std::string s = strip(field);
  if (s.empty()) throw IoError(where + ": empty field");
  char* end = nullptr;
  const long value = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw IoError(where + ": cannot parse integer '" + s + "'");
  return value;
}

}  // namespace detail

/// Shared matrix format: one row per line, comma-separated decimals,
/// no header. Ragged rows are rejected.
inline Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::strip(line).empty()) continue;
    const std::vector<std::string> fields = detail::split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields)
      row.push_back(detail::parse_double(
          f, path + ":" + std::to_string(lineno)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no data");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

/// Labels format: one integer per line.
inline LabelVector read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  LabelVector labels;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::strip(line).empty()) continue;
    labels.push_back(static_cast<int>(
        detail::parse_long(line, path + ":" + std::to_string(lineno))));
  }
  if (labels.empty()) throw IoError(path + ": no labels");
  return labels;
}

inline void write_labels_csv(const std::string& path, const LabelVector& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int v : labels) out << v << '\n';
}

inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<IterateDiagnostics>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "iter,lagrangian,objective,primal_residual,y_change,dual_change,"
         "kkt_stationarity\n";
  for (const IterateDiagnostics& d : history) {
    out << d.iter << ',' << format_double(d.lagrangian) << ','
        << format_double(d.objective) << ',' << format_double(d.primal_residual)
        << ',' << format_double(d.y_change) << ',' << format_double(d.dual_change)
        << ',' << format_double(d.kkt_residual) << '\n';
  }
}

inline nlohmann::json summary_json(Eigen::Index n, const SolverConfig& cfg,
                                   int iters, StopReason reason,
                                   double final_objective,
                                   const KktResiduals& kkt) {
  return nlohmann::json{
      {"n", n},
      {"k", cfg.k},
      {"lambda", cfg.lambda},
      {"rho", cfg.rho_value()},
      {"alpha", cfg.bounds.alpha},
      {"beta", cfg.bounds.beta},
      {"iters", iters},
      {"stop_reason", to_string(reason)},
      {"final_objective", final_objective},
      {"final_kkt",
       {{"primal", kkt.primal},
        {"stationarity", kkt.stationarity},
        {"eigen_gap", kkt.eigen_gap}}},
  };
}

/// Block-model description file: `key = value` lines, '#' comments.
/// Keys: sizes (comma list), psi_diag + psi_offdiag or psi (rows split
/// by ';'), seed, reps.
struct ModelFile {
  BlockModel model;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
};

inline ModelFile parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<Eigen::Index> sizes;
  std::optional<double> psi_diag, psi_offdiag;
  std::optional<Eigen::MatrixXd> psi;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::strip(line);
    if (stripped.empty()) continue;
    auto sep = stripped.find('=');
    if (sep == std::string::npos) sep = stripped.find(':');
    if (sep == std::string::npos)
      throw IoError(where + ": expected 'key = value'");
    const std::string key = detail::strip(stripped.substr(0, sep));
    const std::string value = detail::strip(stripped.substr(sep + 1));
    if (key == "sizes") {
      for (const std::string& f : detail::split(value, ','))
        sizes.push_back(static_cast<Eigen::Index>(detail::parse_long(f, where)));
    } else if (key == "psi_diag") {
      psi_diag = detail::parse_double(value, where);
    } else if (key == "psi_offdiag") {
      psi_offdiag = detail::parse_double(value, where);
    } else if (key == "psi") {
      const std::vector<std::string> row_specs = detail::split(value, ';');
      const auto kk = static_cast<Eigen::Index>(row_specs.size());
      Eigen::MatrixXd full(kk, kk);
      for (Eigen::Index i = 0; i < kk; ++i) {
        const std::vector<std::string> fields =
            detail::split(row_specs[static_cast<size_t>(i)], ',');
        if (static_cast<Eigen::Index>(fields.size()) != kk)
          throw IoError(where + ": psi must be square");
        for (Eigen::Index j = 0; j < kk; ++j)
          full(i, j) = detail::parse_double(fields[static_cast<size_t>(j)], where);
      }
      psi = std::move(full);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(detail::parse_long(value, where));
    } else if (key == "reps") {
      reps = static_cast<int>(detail::parse_long(value, where));
    } else {
      throw IoError(where + ": unknown key '" + key + "'");
    }
  }

  if (sizes.empty()) throw IoError(path + ": missing sizes");
  if (psi) {
    return ModelFile{BlockModel(std::move(sizes), std::move(*psi)), seed, reps};
  }
  if (!psi_diag || !psi_offdiag)
    throw IoError(path + ": need psi or both psi_diag and psi_offdiag");
  return ModelFile{BlockModel::uniform(std::move(sizes), *psi_diag, *psi_offdiag),
                   seed, reps};
}

}  // namespace rbpma
