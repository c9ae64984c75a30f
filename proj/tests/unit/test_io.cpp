#include "vinedep/data_io.hpp"
#include "vinedep/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace vinedep;

TEST_CASE("delimiter detection") {
  CHECK(detect_delimiter("id\ta\tb\n1\t2\t3\n") == '\t');
  CHECK(detect_delimiter("id,a,b\n") == ',');
  CHECK(delimiter_for_path("x.tsv") == '\t');
  CHECK(delimiter_for_path("x.csv") == ',');
}

TEST_CASE("tables parse names, ids and missing cells") {
  const auto t = parse_table("gene,a,b,c\ns1,1.5,NA,3\n# comment\ns2, 2 ,,-4e-1\r\n\n");
  CHECK(t.column_names == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.row_ids == std::vector<std::string>{"s1", "s2"});
  CHECK(t.values(0, 0) == 1.5);
  CHECK(std::isnan(t.values(0, 1)));
  CHECK(std::isnan(t.values(1, 1)));
  CHECK(t.values(1, 0) == 2.0);
  CHECK(t.values(1, 2) == -0.4);
  CHECK_THROWS_AS(parse_table("id,a\ns1,1,2\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_table("id,a\ns1,abc\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_table(""), InvalidArgument);
  CHECK_THROWS_AS(parse_table("id\n"), InvalidArgument);
}

TEST_CASE("quoted fields") {
  const auto t = parse_table("id,\"x,y\",z\n\"r,1\",1,2\n");
  CHECK(t.column_names == std::vector<std::string>{"x,y", "z"});
  CHECK(t.row_ids.front() == "r,1");
  const auto text = format_table(t);
  CHECK(text == "id,\"x,y\",z\n\"r,1\",1,2\n");
}

TEST_CASE("numbers round trip through text") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.125, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "NA");
  Table t{{"s1", "s2"}, {"a"}, Eigen::MatrixXd::Constant(2, 1, 1.0 / 7.0)};
  t.values(1, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto back = parse_table(format_table(t, '\t'));
  CHECK(back.values(0, 0) == t.values(0, 0));
  CHECK(std::isnan(back.values(1, 0)));
}

TEST_CASE("correlation tables") {
  const auto r = correlation_from_table(parse_table("id,a,b\na,1,0.5\nb,0.5,1\n"));
  CHECK(r.variable_names() == std::vector<std::string>{"a", "b"});
  CHECK(r(0, 1) == 0.5);
  CHECK_THROWS_AS(correlation_from_table(parse_table("id,a,b\na,1,0.5\nc,0.5,1\n")), InvalidArgument);
  CHECK_THROWS_AS(correlation_from_table(parse_table("id,a,b\na,1,0.5\n")), InvalidArgument);
  const auto again = correlation_from_table(parse_table(format_table(table_from(r))));
  CHECK(again.values() == r.values());
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "vinedep_io_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "data.tsv";
  write_text(path, "id\tg1\tg2\ts\n1\t0.5\t2\t1\n2\t0.7\t1\t2\n3\t0.1\t3\t3\n");
  const auto d = read_data(path);
  CHECK(d.variable_names() == std::vector<std::string>{"g1", "g2", "s"});
  CHECK(d.sample_ids() == std::vector<std::string>{"1", "2", "3"});
  CHECK(read_text(path).size() > 0);
  CHECK_THROWS_AS(read_text(dir / "absent.csv"), Error);
  std::filesystem::remove_all(dir);
}
