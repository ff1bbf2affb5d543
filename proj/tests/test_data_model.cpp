#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rpm/error.hpp"
#include "rpm/io.hpp"

using namespace rpm;

namespace {

Dataset from_csv(std::string_view text, const std::string& target, char delim = ',') {
  SchemaOptions s;
  s.target = target;
  return build_dataset(parse_csv(text, CsvOptions{delim}), s);
}

Dataset random_mixed(std::mt19937& gen, std::size_t rows) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> cat(0, 2);
  std::vector<AttributeMeta> attrs = {
      {"a", AttributeKind::numeric, {}, AttributeRole::regular},
      {"b", AttributeKind::nominal, {"p", "q", "r"}, AttributeRole::regular},
      {"c", AttributeKind::numeric, {}, AttributeRole::regular},
      {"y", AttributeKind::nominal, {"no", "yes"}, AttributeRole::target},
  };
  std::vector<double> cells;
  for (std::size_t r = 0; r < rows; ++r) {
    cells.push_back(u(gen));
    cells.push_back(cat(gen));
    cells.push_back(std::round(u(gen) * 100) / 7.0);
    cells.push_back(cat(gen) % 2);
  }
  return Dataset(attrs, cells);
}

}  // namespace

TEST_CASE("csv with three columns and two rows") {
  const Dataset d = from_csv("a,b,y\n1,2,x\n3,4,z\n", "y");
  CHECK(d.num_rows() == 2);
  CHECK(d.num_attributes() == 3);
  CHECK(d.target().name == "y");
  CHECK(d.class_labels() == std::vector<std::string>{"x", "z"});
  CHECK(d.at(1, 0) == 3.0);
}

TEST_CASE("csv parsing details") {
  SUBCASE("quoted fields, escapes, CRLF and BOM") {
    const RawTable t = parse_csv("\xEF\xBB\xBF\"name\",v\r\n\"a, \"\"b\"\"\",1\r\n\r\nplain , 2\r\n");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header[0] == "name");
    CHECK(t.rows[0][0] == "a, \"b\"");
    CHECK(t.rows[1][0] == "plain");
  }
  SUBCASE("semicolon delimiter") {
    const Dataset d = from_csv("school;age;G3\nGP;18;11\nMS;17;9\n", "G3", ';');
    CHECK(d.attribute(0).is_nominal());
    CHECK_FALSE(d.attribute(1).is_nominal());
  }
  SUBCASE("ragged rows are rejected") { CHECK_THROWS_AS(parse_csv("a,b\n1\n"), DataError); }
  SUBCASE("missing target column") { CHECK_THROWS_AS(from_csv("a,b\n1,2\n", "y"), DataError); }
  SUBCASE("missing target cell") { CHECK_THROWS_AS(from_csv("a,y\n1,?\n2,k\n", "y"), DataError); }
}

TEST_CASE("missing tokens and empty cells become missing") {
  const Dataset d = from_csv("a,b,y\n?,u,k\n2,,k\n3,v,j\n", "y");
  CHECK(is_missing(d.at(0, 0)));
  CHECK(is_missing(d.at(1, 1)));
  CHECK(d.attribute(1).is_nominal());
  CHECK(d.has_missing());
}

TEST_CASE("type inference prefers numeric and sorts numeric labels by value") {
  const Dataset d = from_csv("a,y\n1,10\n2,9\n3,2\n", "y");
  CHECK_FALSE(d.attribute(0).is_nominal());
  CHECK(d.class_labels() == std::vector<std::string>{"2", "9", "10"});
}

TEST_CASE("load_csv reads files and reports unreadable paths") {
  const auto path = std::filesystem::temp_directory_path() / "rpm_test_load.csv";
  {
    std::ofstream out(path);
    out << "x;y\n1;a\n2;b\n";
  }
  const Dataset d = load_csv(path, LoadOptions{';', "?", "y"});
  CHECK(d.num_rows() == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_csv(path, LoadOptions{',', "?", "y"}), Error);
}

TEST_CASE("arff reader") {
  const std::string text =
      "% comment\n@relation 'bank'\n@attribute Attr1 numeric\n@attribute kind {b,a}\n"
      "@attribute class {0,1}\n@data\n0.5,a,0\n?,b,1\n1.5,a,1\n";
  const auto path = std::filesystem::temp_directory_path() / "rpm_test.arff";
  {
    std::ofstream out(path);
    out << text;
  }
  const Dataset d = load_arff(path);
  std::filesystem::remove(path);
  CHECK(d.target().name == "class");
  CHECK(d.attribute(1).categories == std::vector<std::string>{"b", "a"});
  CHECK(is_missing(d.at(1, 0)));
  CHECK(d.num_rows() == 3);
}

TEST_CASE("dataset invariants are enforced") {
  const AttributeMeta num{"a", AttributeKind::numeric, {}, AttributeRole::regular};
  const AttributeMeta tgt{"y", AttributeKind::nominal, {"n", "p"}, AttributeRole::target};
  CHECK_NOTHROW(Dataset({num, tgt}, {1.0, 0.0}));
  CHECK_THROWS_AS(Dataset({num, num, tgt}, {1, 1, 0}), DataError);                      // duplicate names
  CHECK_THROWS_AS(Dataset({num}, {1.0}), DataError);                                     // no target
  CHECK_THROWS_AS(Dataset({num, tgt}, {1.0, 2.0}), DataError);                           // index out of range
  CHECK_THROWS_AS(Dataset({num, tgt}, {1.0, kMissing}), DataError);                      // missing target
  CHECK_THROWS_AS(Dataset({num, tgt}, {1.0, 0.0, 2.0}), DataError);                      // ragged
  AttributeMeta dup{"b", AttributeKind::nominal, {"u", "u"}, AttributeRole::regular};
  CHECK_THROWS_AS(Dataset({dup, tgt}, {0.0, 0.0}), DataError);
  AttributeMeta numeric_target{"y", AttributeKind::numeric, {}, AttributeRole::target};
  CHECK_THROWS_AS(Dataset({num, numeric_target}, {1.0, 0.0}), DataError);
}

TEST_CASE("impute_missing") {
  SUBCASE("numeric mean") {
    const Dataset d = from_csv("a,y\n1,k\n?,k\n3,k\n", "y");
    CHECK(impute_missing(d).at(1, 0) == doctest::Approx(2.0));
  }
  SUBCASE("nominal mode") {
    const Dataset d = from_csv("a,y\na,k\na,k\n?,k\nb,k\n", "y");
    const Dataset out = impute_missing(d);
    CHECK(out.attribute(0).categories[static_cast<std::size_t>(out.at(2, 0))] == "a");
  }
  SUBCASE("identity without missing cells, and idempotent") {
    std::mt19937 gen(3);
    const Dataset d = random_mixed(gen, 20);
    CHECK(impute_missing(d) == d);
    const Dataset m = from_csv("a,b,y\n1,?,k\n?,u,k\n4,v,j\n", "y");
    CHECK(impute_missing(impute_missing(m)) == impute_missing(m));
    CHECK_FALSE(impute_missing(m).has_missing());
  }
  SUBCASE("an all-missing attribute is rejected") {
    CHECK_THROWS_AS(impute_missing(from_csv("a,b,y\n?,1,k\n?,2,k\n", "y")), DataError);
  }
}

TEST_CASE("encode_numeric") {
  const Dataset d = from_csv("f,g,h,i,j,y\nno,1,2,3,4,k\nyes,5,6,7,8,k\n", "y");
  const NumericMatrix m = encode_numeric(d);
  CHECK(m.cols == 5);
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(1, 0) == 1.0);
  CHECK(m.at(1, 4) == 8.0);
  CHECK(encode_numeric(d) == m);
}

TEST_CASE("transpose shape, normalization and involution") {
  std::mt19937 gen(11);
  const Dataset two = from_csv("a,b,c,y\n1,2,3,k\n4,5,6,j\n", "y");
  const AttributeMatrix t = transpose(two, false);
  CHECK(t.num_rows() == 3);
  CHECK(t.row_length() == 2);
  CHECK(t.rows[2] == std::vector<double>{3, 6});

  const Dataset constant = from_csv("a,b,y\n5,1,k\n5,2,k\n5,4,j\n", "y");
  const AttributeMatrix z = transpose(constant, true);
  CHECK(z.rows[0] == std::vector<double>{0, 0, 0});

  for (int trial = 0; trial < 25; ++trial) {
    const Dataset d = random_mixed(gen, 5 + static_cast<std::size_t>(trial));
    CHECK(retranspose(transpose(d, false), d) == d);
    const AttributeMatrix n = transpose(d, true);
    for (const auto& row : n.rows) {
      double mean = 0, var = 0;
      for (double v : row) mean += v / static_cast<double>(row.size());
      for (double v : row) var += (v - mean) * (v - mean) / static_cast<double>(row.size());
      const bool constant_row = std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
      CHECK(std::abs(mean) < 1e-9);
      if (!constant_row) CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
    const Dataset back = retranspose(n, d);
    double worst = 0;
    for (std::size_t i = 0; i < d.cells().size(); ++i) {
      const double a = back.cells()[i], b = d.cells()[i];
      if (is_missing(a) || is_missing(b)) {
        CHECK(is_missing(a) == is_missing(b));
      } else {
        worst = std::max(worst, std::abs(a - b));
      }
    }
    CHECK(worst < 1e-9);
    CHECK(back.attributes() == d.attributes());
  }
  const Dataset only_target({{"y", AttributeKind::nominal, {"k"}, AttributeRole::target}}, {0.0, 0.0});
  CHECK_THROWS_AS(transpose(only_target, true), DataError);
}

TEST_CASE("project_attributes") {
  std::vector<std::vector<double>> rows(7, std::vector<double>(10));
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < 10; ++c) rows[r][c] = double(r * 10 + c);
    labels.push_back(r % 2 ? "b" : "a");
  }
  const Dataset d = oracle::numeric_dataset(rows, labels);
  const std::vector<std::string> three = {"x7", "x2", "x4"};
  const Dataset p = project_attributes(d, three);
  CHECK(p.num_attributes() == 4);
  CHECK(p.num_rows() == d.num_rows());
  CHECK(p.regular_names() == std::vector<std::string>{"x2", "x4", "x7"});
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    CHECK(p.class_of(r) == d.class_of(r));
    CHECK(p.at(r, p.index_of("x7")) == d.at(r, d.index_of("x7")));
  }
  const auto all = d.regular_names();
  CHECK(project_attributes(d, all) == d);
  CHECK_THROWS_AS(project_attributes(d, std::vector<std::string>{}), DataError);
  CHECK_THROWS_AS(project_attributes(d, std::vector<std::string>{"nope"}), DataError);
  CHECK_THROWS_AS(project_attributes(d, std::vector<std::string>{"class"}), DataError);
}
