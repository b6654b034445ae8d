#include "gls/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gls/errors.hpp"

namespace gls {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void write_matrix_csv(const fs::path& path, const DenseMatrix& m) {
  std::ofstream out = open_out(path);
  out << m.rows() << "," << m.cols() << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

DenseMatrix read_matrix_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty matrix file: " + path.string());
  auto header = split_commas(line);
  if (header.size() != 2) throw IoError("bad matrix header in " + path.string());
  const std::size_t rows = std::stoul(trim(header[0]));
  const std::size_t cols = std::stoul(trim(header[1]));
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw IoError("truncated matrix file: " + path.string());
    auto cells = split_commas(line);
    if (cells.size() != cols) throw IoError("bad row width in " + path.string());
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = std::stod(trim(cells[j]));
  }
  return m;
}

void write_vector_csv(const fs::path& path, const Vector& v) {
  write_matrix_csv(path, DenseMatrix::column(v));
}

Vector read_vector_csv(const fs::path& path) {
  DenseMatrix m = read_matrix_csv(path);
  if (m.cols() != 1) throw IoError("expected a single-column vector: " + path.string());
  return m.col(0);
}

void write_key_values(const fs::path& path, const KeyValues& kv) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
}

KeyValues read_key_values(const fs::path& path) {
  std::ifstream in = open_in(path);
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw IoError("bad key=value line in " + path.string());
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_trace_csv(const fs::path& path, const PcgTrace& trace) {
  std::ofstream out = open_out(path);
  out << "iter,c_i,aug_residual_norm,dual_feas_norm,rmse,elapsed_ns\n";
  for (const auto& row : trace.rows) {
    out << row.iter << "," << format_double(row.c) << ","
        << format_double(row.aug_residual_norm) << ","
        << format_double(row.dual_feas_norm) << ",";
    if (!std::isnan(row.rmse)) out << format_double(row.rmse);
    out << "," << row.elapsed_ns << "\n";
  }
}

ProblemKind detect_problem_kind(const fs::path& dir) {
  if (fs::exists(dir / "blocks")) return ProblemKind::Sur;
  if (fs::exists(dir / "Z0.csv")) return ProblemKind::MvRglm;
  return ProblemKind::Plain;
}

Glm load_problem_dir(const fs::path& dir) {
  DenseMatrix x = read_matrix_csv(dir / "X.csv");
  Vector y = read_vector_csv(dir / "y.csv");
  if (fs::exists(dir / "sigma_dense.csv")) {
    return make_glm(std::move(y), std::move(x),
                    SymmetricOperator::dense(read_matrix_csv(dir / "sigma_dense.csv")));
  }
  if (fs::exists(dir / "sigma_core.csv")) {
    KeyValues meta = read_key_values(dir / "meta.toml");
    const std::size_t block = std::stoul(meta.at("block"));
    return make_glm(std::move(y), std::move(x),
                    SymmetricOperator::kronecker_identity(
                        read_matrix_csv(dir / "sigma_core.csv"), block));
  }
  if (fs::exists(dir / "omega.csv")) {
    KeyValues meta = read_key_values(dir / "meta.toml");
    const std::size_t zero_rows = std::stoul(meta.at("zero_rows"));
    return make_glm(std::move(y), std::move(x),
                    SymmetricOperator::block_zero_padded(read_matrix_csv(dir / "omega.csv"),
                                                         zero_rows));
  }
  throw IoError("no covariance file found in " + dir.string());
}

void save_problem_dir(const fs::path& dir, const Glm& glm) {
  fs::create_directories(dir);
  write_matrix_csv(dir / "X.csv", glm.x);
  write_vector_csv(dir / "y.csv", glm.y);
  if (glm.sigma.is_kronecker()) {
    write_matrix_csv(dir / "sigma_core.csv", glm.sigma.kron_core());
    write_key_values(dir / "meta.toml", {{"block", std::to_string(glm.sigma.kron_block())}});
  } else if (glm.sigma.is_block_zero_padded()) {
    write_matrix_csv(dir / "omega.csv", glm.sigma.padded_top());
    write_key_values(dir / "meta.toml",
                     {{"zero_rows", std::to_string(glm.sigma.padded_zero_rows())}});
  } else {
    write_matrix_csv(dir / "sigma_dense.csv", glm.sigma.to_dense());
  }
}

SurModel load_sur_dir(const fs::path& dir) {
  std::vector<DenseMatrix> blocks;
  for (std::size_t i = 1;; ++i) {
    const fs::path p = dir / "blocks" / ("X_" + std::to_string(i) + ".csv");
    if (!fs::exists(p)) break;
    blocks.push_back(read_matrix_csv(p));
  }
  if (blocks.empty()) throw IoError("no blocks/X_*.csv found in " + dir.string());
  return make_sur(std::move(blocks), read_matrix_csv(dir / "Y.csv"),
                  read_matrix_csv(dir / "sigma0.csv"));
}

void save_sur_dir(const fs::path& dir, const SurModel& sur) {
  fs::create_directories(dir / "blocks");
  for (std::size_t i = 0; i < sur.blocks.size(); ++i)
    write_matrix_csv(dir / "blocks" / ("X_" + std::to_string(i + 1) + ".csv"),
                     sur.blocks[i]);
  write_matrix_csv(dir / "Y.csv", sur.y);
  write_matrix_csv(dir / "sigma0.csv", sur.sigma0);
}

namespace {

std::vector<std::vector<std::size_t>> read_restrictions(const fs::path& path,
                                                        std::size_t g) {
  std::vector<std::vector<std::size_t>> out(g);
  std::ifstream in = open_in(path);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    auto cells = split_commas(line);
    if (cells.size() != 2) throw IoError("bad restrictions row in " + path.string());
    const std::size_t eq = std::stoul(trim(cells[0]));
    const std::size_t col = std::stoul(trim(cells[1]));
    if (eq >= g) throw IoError("restriction equation index out of range");
    out[eq].push_back(col);
  }
  for (auto& list : out) std::sort(list.begin(), list.end());
  return out;
}

}  // namespace

MvRglm load_mvrglm_dir(const fs::path& dir) {
  DenseMatrix z0 = read_matrix_csv(dir / "Z0.csv");
  DenseMatrix y = read_matrix_csv(dir / "Y.csv");
  DenseMatrix omega0 = read_matrix_csv(dir / "omega0.csv");
  std::vector<std::vector<std::size_t>> restr(y.cols());
  if (fs::exists(dir / "restrictions.csv"))
    restr = read_restrictions(dir / "restrictions.csv", y.cols());
  return make_mvrglm(std::move(z0), std::move(y), std::move(omega0), std::move(restr));
}

void save_mvrglm_dir(const fs::path& dir, const MvRglm& mv) {
  fs::create_directories(dir);
  write_matrix_csv(dir / "Z0.csv", mv.z0);
  write_matrix_csv(dir / "Y.csv", mv.y);
  write_matrix_csv(dir / "omega0.csv", mv.omega0);
  std::ofstream out = open_out(dir / "restrictions.csv");
  out << "equation_index,column_index\n";
  for (std::size_t i = 0; i < mv.restrictions.size(); ++i)
    for (std::size_t col : mv.restrictions[i]) out << i << "," << col << "\n";
}

}  // namespace gls
