#include "krr/datasets_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace krr {

namespace {

double parse_field(const std::string& token, const std::string& path,
                   std::size_t line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE)
    throw ArgumentError(path + ":" + std::to_string(line_no) +
                        ": malformed numeric field '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

Dataset load_csv(const DatasetSource& src) {
  std::ifstream in(src.path);
  if (!in) throw ArgumentError("cannot open dataset file: " + src.path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_field(f, src.path, line_no));
    if (width == 0)
      width = row.size();
    else if (row.size() != width)
      throw ArgumentError(src.path + ":" + std::to_string(line_no) +
                          ": expected " + std::to_string(width) +
                          " fields, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError("empty dataset file: " + src.path);

  Eigen::Index label = src.label_column.value_or(
      static_cast<Eigen::Index>(width) - 1);
  if (label < 0 || label >= static_cast<Eigen::Index>(width))
    throw ArgumentError("label column " + std::to_string(label) +
                        " out of range for " + std::to_string(width) +
                        "-column file " + src.path);
  if (width < 2)
    throw ArgumentError("csv dataset needs at least one feature column: " +
                        src.path);

  Dataset d;
  d.name = src.path;
  d.X.resize(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(width) - 1);
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (static_cast<Eigen::Index>(j) == label)
        d.y(static_cast<Eigen::Index>(i)) = rows[i][j];
      else
        d.X(static_cast<Eigen::Index>(i), c++) = rows[i][j];
    }
  }
  return d;
}

Dataset load_svmlight(const DatasetSource& src) {
  std::ifstream in(src.path);
  if (!in) throw ArgumentError("cannot open dataset file: " + src.path);

  struct Row {
    double label;
    std::vector<std::pair<Eigen::Index, double>> entries;
  };
  std::vector<Row> rows;
  Eigen::Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok))
      throw ArgumentError(src.path + ":" + std::to_string(line_no) +
                          ": missing label");
    Row row;
    row.label = parse_field(tok, src.path, line_no);
    while (ss >> tok) {
      auto colon = tok.find(':');
      if (colon == std::string::npos)
        throw ArgumentError(src.path + ":" + std::to_string(line_no) +
                            ": expected index:value, got '" + tok + "'");
      double idx = parse_field(tok.substr(0, colon), src.path, line_no);
      double val = parse_field(tok.substr(colon + 1), src.path, line_no);
      if (idx < 1 || idx != std::floor(idx))
        throw ArgumentError(src.path + ":" + std::to_string(line_no) +
                            ": indices are 1-based integers, got '" +
                            tok.substr(0, colon) + "'");
      Eigen::Index ii = static_cast<Eigen::Index>(idx);
      max_index = std::max(max_index, ii);
      row.entries.emplace_back(ii, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError("empty dataset file: " + src.path);

  Eigen::Index d_cols = src.dimension.value_or(max_index);
  if (d_cols < max_index)
    throw ArgumentError("declared dimension " + std::to_string(d_cols) +
                        " smaller than the largest index " +
                        std::to_string(max_index) + " in " + src.path);

  Dataset d;
  d.name = src.path;
  d.X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), d_cols);
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.y(static_cast<Eigen::Index>(i)) = rows[i].label;
    for (auto [idx, val] : rows[i].entries)
      d.X(static_cast<Eigen::Index>(i), idx - 1) = val;
  }
  return d;
}

}  // namespace

void normalize_inplace(Eigen::MatrixXd& X, Normalize mode) {
  switch (mode) {
    case Normalize::None:
      return;
    case Normalize::UnitSphere:
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double n = X.row(i).norm();
        if (n == 0)
          throw ArgumentError("unit-sphere normalization: row " +
                              std::to_string(i) + " is zero");
        X.row(i) /= n;
      }
      return;
    case Normalize::ZScore:
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double mean = X.col(j).mean();
        double var = (X.col(j).array() - mean).square().sum() /
                     static_cast<double>(X.rows());
        double sd = std::sqrt(var);
        if (sd > 0)
          X.col(j) = (X.col(j).array() - mean) / sd;
        else
          X.col(j).setZero();
      }
      return;
  }
}

Normalize normalize_from_name(const std::string& name) {
  if (name == "none") return Normalize::None;
  if (name == "unit-sphere") return Normalize::UnitSphere;
  if (name == "z-score") return Normalize::ZScore;
  throw ArgumentError("unknown normalization: " + name);
}

std::string normalize_name(Normalize mode) {
  switch (mode) {
    case Normalize::None:
      return "none";
    case Normalize::UnitSphere:
      return "unit-sphere";
    case Normalize::ZScore:
      return "z-score";
  }
  return "none";
}

Dataset load(const DatasetSource& source) {
  Dataset d = source.format == DataFormat::Csv ? load_csv(source)
                                               : load_svmlight(source);
  normalize_inplace(d.X, source.normalize);
  d.validate();
  return d;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open output file: " + path);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    out << "\n";
  }
  if (!out) throw ArgumentError("write failed: " + path);
}

void write_csv_rows(const std::string& path, const std::string& header,
                    const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open output file: " + path);
  out << header << "\n";
  for (const auto& row : rows) out << row << "\n";
  if (!out) throw ArgumentError("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ArgumentError("write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line_no == 1 || line.empty()) continue;  // header
    auto fields = split(line, ',');
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_field(f, path, line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace krr
