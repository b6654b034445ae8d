#ifndef GLS_IO_HPP
#define GLS_IO_HPP

#include <filesystem>
#include <map>
#include <string>

#include "gls/glm.hpp"
#include "gls/pcg.hpp"
#include "gls/structured.hpp"

namespace gls {

// Matrix CSV: first line "rows,cols", then one comma-separated line per row
// at full double precision.
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path);

// Flat "key = value" files (meta.toml, config.replay.toml).
using KeyValues = std::map<std::string, std::string>;
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

// Columns: iter,c_i,aug_residual_norm,dual_feas_norm,rmse,elapsed_ns;
// rmse is left empty when unknown.
void write_trace_csv(const std::filesystem::path& path, const PcgTrace& trace);

enum class ProblemKind { Plain, Sur, MvRglm };
ProblemKind detect_problem_kind(const std::filesystem::path& dir);

// Plain GLM directory: X.csv, y.csv and one of sigma_dense.csv /
// sigma_core.csv (+ "block" in meta.toml) / omega.csv (+ "zero_rows").
Glm load_problem_dir(const std::filesystem::path& dir);
void save_problem_dir(const std::filesystem::path& dir, const Glm& glm);

// SUR directory: blocks/X_1.csv..X_G.csv, Y.csv, sigma0.csv.
SurModel load_sur_dir(const std::filesystem::path& dir);
void save_sur_dir(const std::filesystem::path& dir, const SurModel& sur);

// Multivariate RGLM directory: Z0.csv, Y.csv, omega0.csv, restrictions.csv
// (rows: equation_index,column_index).
MvRglm load_mvrglm_dir(const std::filesystem::path& dir);
void save_mvrglm_dir(const std::filesystem::path& dir, const MvRglm& mv);

std::string format_double(double v);

}  // namespace gls

#endif  // GLS_IO_HPP
