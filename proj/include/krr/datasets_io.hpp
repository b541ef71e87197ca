#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krr/kernels.hpp"

#include "json.hpp"

namespace krr {

enum class DataFormat { Csv, SvmLight };
enum class Normalize { None, UnitSphere, ZScore };

/// Where and how to read a dataset. CSV rows are plain numeric fields
/// (comma-separated, no header); svmlight lines are
/// "<label> <index>:<value> ..." with 1-based indices.
struct DatasetSource {
  DataFormat format = DataFormat::Csv;
  std::string path;
  std::optional<Eigen::Index> label_column;    // csv only; 0-based
  Normalize normalize = Normalize::None;
  std::optional<Eigen::Index> dimension;       // svmlight: declared d
};

/// Load a dense dataset. Row order follows file order; normalization is
/// applied after parsing. Malformed lines report their 1-based line number.
Dataset load(const DatasetSource& source);

/// Apply the named normalization in place. UnitSphere rescales each row to
/// unit Euclidean norm (zero rows are an error); ZScore standardizes each
/// column (constant columns become zero).
void normalize_inplace(Eigen::MatrixXd& X, Normalize mode);

Normalize normalize_from_name(const std::string& name);
std::string normalize_name(Normalize mode);

/// Write rows as CSV with a header; numbers carry 17 significant digits so a
/// read-back reproduces the exact doubles.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// Same, with preformatted rows (callers that mix strings and numbers).
void write_csv_rows(const std::string& path, const std::string& header,
                    const std::vector<std::string>& rows);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// Read back a numeric CSV written by write_csv (header skipped).
std::vector<std::vector<double>> read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace krr
