#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "krr/datasets_io.hpp"

using namespace krr;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_SUITE("datasets-io") {

TEST_CASE("csv with explicit label column") {
  TempFile f("krr_t1.csv", "1.0,2.0,0.5\n");
  DatasetSource src;
  src.path = f.path.string();
  src.label_column = 2;
  Dataset d = load(src);
  CHECK(d.X.rows() == 1);
  CHECK(d.X.cols() == 2);
  CHECK(d.X(0, 0) == 1.0);
  CHECK(d.X(0, 1) == 2.0);
  CHECK(d.y(0) == 0.5);
}

TEST_CASE("csv defaults to the last column as label") {
  TempFile f("krr_t2.csv", "1,2,3\n4,5,6\n");
  DatasetSource src;
  src.path = f.path.string();
  Dataset d = load(src);
  CHECK(d.X.rows() == 2);
  CHECK(d.y(1) == 6.0);
}

TEST_CASE("svmlight sparse line") {
  TempFile f("krr_t3.svm", "1 1:0.5 3:2.0\n");
  DatasetSource src;
  src.format = DataFormat::SvmLight;
  src.path = f.path.string();
  src.dimension = 3;
  Dataset d = load(src);
  CHECK(d.y(0) == 1.0);
  CHECK(d.X(0, 0) == 0.5);
  CHECK(d.X(0, 1) == 0.0);
  CHECK(d.X(0, 2) == 2.0);
}

TEST_CASE("unit-sphere normalization") {
  TempFile f("krr_t4.csv", "3,4,1\n1,1,0\n");
  DatasetSource src;
  src.path = f.path.string();
  src.normalize = Normalize::UnitSphere;
  Dataset d = load(src);
  for (Eigen::Index i = 0; i < d.X.rows(); ++i)
    CHECK(std::abs(d.X.row(i).norm() - 1.0) <= 1e-12);
}

TEST_CASE("z-score normalization centers and scales columns") {
  TempFile f("krr_t5.csv", "1,10,0\n2,20,0\n3,30,0\n");
  DatasetSource src;
  src.path = f.path.string();
  src.normalize = Normalize::ZScore;
  Dataset d = load(src);
  for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
    CHECK(std::abs(d.X.col(j).mean()) <= 1e-14);
    double var = d.X.col(j).squaredNorm() / 3.0;
    CHECK(var == doctest::Approx(1.0));
  }
}

TEST_CASE("malformed line reports its number") {
  TempFile f("krr_t6.csv", "1,2,3\n4,oops,6\n");
  DatasetSource src;
  src.path = f.path.string();
  CHECK_THROWS_WITH_AS(load(src), doctest::Contains(":2"), ArgumentError);
}

TEST_CASE("empty file is an error") {
  TempFile f("krr_t7.csv", "");
  DatasetSource src;
  src.path = f.path.string();
  CHECK_THROWS_AS(load(src), ArgumentError);
}

TEST_CASE("missing file mentions the path") {
  DatasetSource src;
  src.path = "/nonexistent/krr.csv";
  CHECK_THROWS_WITH_AS(load(src), doctest::Contains("/nonexistent/krr.csv"),
                       ArgumentError);
}

TEST_CASE("svmlight rejects bad indices") {
  TempFile f("krr_t8.svm", "1 0:0.5\n");
  DatasetSource src;
  src.format = DataFormat::SvmLight;
  src.path = f.path.string();
  CHECK_THROWS_AS(load(src), ArgumentError);
}

TEST_CASE("csv round trip preserves doubles exactly") {
  fs::path p = fs::temp_directory_path() / "krr_rt.csv";
  std::vector<std::vector<double>> rows = {
      {1.0 / 3.0, 2.0e-17, -123456.789012345678},
      {0.1 + 0.2, 1e300, -0.0}};
  write_csv(p.string(), "a,b,c", rows);
  auto back = read_csv(p.string());
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      CHECK(back[i][j] == rows[i][j]);
  fs::remove(p);
}

TEST_CASE("empty record list produces a header-only csv") {
  fs::path p = fs::temp_directory_path() / "krr_empty.csv";
  write_csv(p.string(), "a,b", {});
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  CHECK_FALSE(std::getline(in, line));
  fs::remove(p);
}

TEST_CASE("json write-read round trip") {
  fs::path p = fs::temp_directory_path() / "krr_rt.json";
  nlohmann::json j{{"slope", -0.5}, {"m_grid", {50, 100}}, {"name", "x"}};
  write_json(p.string(), j);
  nlohmann::json back = read_json(p.string());
  CHECK(back == j);
  fs::remove(p);
}

}  // TEST_SUITE
