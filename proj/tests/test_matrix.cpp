#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "logperm/matrix.hpp"

using namespace logperm;

namespace {

std::string tmp_path(const char* stem) {
  return std::string("/tmp/logperm_test_") + stem + ".permmat.json";
}

LogMatrix from_logs(int m, int n, std::vector<double> logs) {
  std::vector<LogReal> e;
  e.reserve(logs.size());
  for (double v : logs) e.push_back(LogReal::from_log(v));
  return LogMatrix(m, n, std::move(e));
}

}  // namespace

TEST_CASE("shape invariant: tall input is transposed") {
  auto a = from_logs(3, 2, {1, 2, 3, 4, 5, 6});
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a.was_transposed());
  // (i,j) of the stored matrix is (j,i) of the input
  CHECK(a.log_at(0, 0) == 1);
  CHECK(a.log_at(1, 0) == 2);
  CHECK(a.log_at(0, 1) == 3);
  CHECK(a.log_at(0, 2) == 5);
  CHECK(a.log_at(1, 2) == 6);

  auto b = from_logs(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(!b.was_transposed());
  CHECK(b.log_at(1, 2) == 6);

  CHECK_THROWS_AS(LogMatrix(0, 0, {}), ConfigError);
  CHECK_THROWS_AS(LogMatrix(2, 2, std::vector<LogReal>(3, LogReal::one())),
                  ConfigError);
}

TEST_CASE("generate keys every entry by (seed, trial, i, j)") {
  auto d = DistSpec::pareto(1.5);
  SeedSpec s{33, 4};
  auto big = LogMatrix::generate(6, 8, d, s);
  auto small = LogMatrix::generate(3, 5, d, s);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j) CHECK(small.log_at(i, j) == big.log_at(i, j));
  // the entry formula is the documented inverse transform
  CHECK(big.log_at(2, 7) == d.sample_log(uniform01(s, 2, 7)).log());
  // provenance is recorded
  CHECK(big.dist().has_value());
  CHECK(big.seed()->seed == 33);
  CHECK(big.seed()->trial == 4);
}

TEST_CASE("extract: overlap identity and compose property") {
  auto d = DistSpec::exp_rate1();
  SeedSpec s{17, 0};
  auto a = LogMatrix::generate(5, 7, d, s);

  SubmatrixSelector sel{{1, 3, 4}, {0, 2, 5, 6}};
  auto b = a.extract(sel);
  CHECK(b.rows() == 3);
  CHECK(b.cols() == 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(b.log_at(i, j) == a.log_at(sel.rows[i], sel.cols[j]));

  SubmatrixSelector inner{{0, 2}, {1, 3}};
  auto c1 = b.extract(inner);
  auto c2 = a.extract(SubmatrixSelector::compose(sel, inner));
  REQUIRE(c1.rows() == c2.rows());
  REQUIRE(c1.cols() == c2.cols());
  for (int i = 0; i < c1.rows(); ++i)
    for (int j = 0; j < c1.cols(); ++j) CHECK(c1.log_at(i, j) == c2.log_at(i, j));
}

TEST_CASE("selector validation") {
  SubmatrixSelector ok{{0, 1}, {0, 2}};
  CHECK_NOTHROW(ok.validate(3, 3));
  CHECK_THROWS_AS((SubmatrixSelector{{}, {0}}.validate(3, 3)), ConfigError);
  CHECK_THROWS_AS((SubmatrixSelector{{1, 0}, {0, 1}}.validate(3, 3)), ConfigError);   // not increasing
  CHECK_THROWS_AS((SubmatrixSelector{{0, 0}, {0, 1}}.validate(3, 3)), ConfigError);   // repeated
  CHECK_THROWS_AS((SubmatrixSelector{{0, 3}, {0, 1}}.validate(3, 3)), ConfigError);   // out of range
  CHECK_THROWS_AS((SubmatrixSelector{{0, 1, 2}, {0, 1}}.validate(3, 3)), ConfigError); // |rows|>|cols|
  auto f = SubmatrixSelector::full(2, 4);
  CHECK(f.rows == std::vector<int>{0, 1});
  CHECK(f.cols == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("save/load round-trips bit-exactly with provenance") {
  auto d = DistSpec::parse("lattice");
  SeedSpec s{99, 12};
  auto a = LogMatrix::generate(4, 6, d, s);
  auto path = tmp_path("roundtrip");
  a.save(path);
  auto b = LogMatrix::load(path);
  CHECK(b.rows() == a.rows());
  CHECK(b.cols() == a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) CHECK(b.log_at(i, j) == a.log_at(i, j));
  CHECK(b.dist()->to_string() == d.to_string());
  CHECK(b.seed()->seed == 99);
  CHECK(b.seed()->trial == 12);
  std::remove(path.c_str());
}

TEST_CASE("save/load handles zero entries and missing provenance") {
  auto a = from_logs(2, 2, {0.0, kNegInf, -700.0, 3.5});
  auto path = tmp_path("zeros");
  a.save(path);
  auto b = LogMatrix::load(path);
  CHECK(b.log_at(0, 1) == kNegInf);
  CHECK(b.log_at(1, 0) == -700.0);
  CHECK(!b.dist().has_value());
  CHECK(!b.seed().has_value());
  std::remove(path.c_str());
}

TEST_CASE("load reports what is wrong and where") {
  auto path = tmp_path("bad");
  auto write = [&](const std::string& text) {
    std::ofstream out(path);
    out << text;
  };

  write("this is not json");
  CHECK_THROWS_AS(LogMatrix::load(path), ConfigError);

  write(R"({"m":2,"n":2,"dist":null,"seed":null,"trial":null})");
  CHECK_THROWS_AS(LogMatrix::load(path), ConfigError);  // log_entries missing

  write(R"({"m":2,"n":2,"dist":null,"seed":null,"trial":null,
            "log_entries":[[0,0],[0]]})");
  CHECK_THROWS_AS(LogMatrix::load(path), ConfigError);  // ragged row

  write(R"({"m":2,"n":2,"dist":"bogus:x=1","seed":null,"trial":null,
            "log_entries":[[0,0],[0,0]]})");
  CHECK_THROWS_AS(LogMatrix::load(path), ConfigError);  // bad dist text

  write(R"({"m":0,"n":2,"dist":null,"seed":null,"trial":null,"log_entries":[]})");
  CHECK_THROWS_AS(LogMatrix::load(path), ConfigError);  // bad shape

  CHECK_THROWS_AS(LogMatrix::load("/tmp/logperm_no_such_file.permmat.json"),
                  ConfigError);

  // the error message names the file
  try {
    write("{}");
    LogMatrix::load(path);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("log_quantile uses type-7 interpolation") {
  // entries with known quantiles: logs {0,1,2,3} over a 2x2
  auto a = from_logs(2, 2, {3.0, 1.0, 0.0, 2.0});
  CHECK(a.log_quantile(0.0) == 0.0);
  CHECK(a.log_quantile(1.0) == 3.0);
  CHECK(a.log_quantile(0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(a.log_quantile(0.25) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(a.log_quantile(-0.1), ConfigError);
  CHECK_THROWS_AS(a.log_quantile(1.1), ConfigError);
}

TEST_CASE("save rejects non-finite magnitudes other than zero") {
  // a LogReal can only be finite or -inf by construction, so build the
  // matrix and confirm save handles the full representable range
  auto a = from_logs(1, 2, {708.0, -708.0});
  auto path = tmp_path("range");
  CHECK_NOTHROW(a.save(path));
  auto b = LogMatrix::load(path);
  CHECK(b.log_at(0, 0) == 708.0);
  CHECK(b.log_at(0, 1) == -708.0);
  std::remove(path.c_str());
}
