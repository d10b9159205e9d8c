#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "sr/io.hpp"

using namespace sr::io;

TEST_CASE("empty table renders a header-only CSV") {
  Table t;
  t.columns = {"a", "b"};
  CHECK(render_table(t, Format::Csv) == "a,b\n");
  CHECK(render_table(t, Format::Json) == "[\n]\n");
}

TEST_CASE("NaN serializes as empty cell and null") {
  Table t;
  t.columns = {"x", "y"};
  t.add_row({1.5, std::numeric_limits<double>::quiet_NaN()});
  CHECK(render_table(t, Format::Csv) == "x,y\n1.5,\n");
  CHECK(render_table(t, Format::Json).find("\"y\": null") != std::string::npos);
}

TEST_CASE("round trip is bit exact for finite doubles") {
  Table t;
  t.columns = {"v"};
  const double vals[] = {1.0 / 3.0, -2.718281828459045e-12, 6.02214076e23, 0.1, -0.0,
                         3.14159265358979323846};
  for (double v : vals) t.add_row({v});
  const std::string body = render_table(t, Format::Csv);
  // parse back
  std::size_t pos = body.find('\n') + 1;
  for (double expect : vals) {
    const std::size_t e = body.find('\n', pos);
    const double got = std::strtod(body.substr(pos, e - pos).c_str(), nullptr);
    CHECK(std::memcmp(&got, &expect, sizeof(double)) == 0);
    pos = e + 1;
  }
}

TEST_CASE("json keeps the column order") {
  Table t;
  t.columns = {"zeta", "alpha", "mid"};
  t.add_row({1.0, 2.0, 3.0});
  const std::string body = render_table(t, Format::Json);
  CHECK(body.find("zeta") < body.find("alpha"));
  CHECK(body.find("alpha") < body.find("mid"));
}

TEST_CASE("row width is validated") {
  Table t;
  t.columns = {"a", "b"};
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
}

TEST_CASE("grid parsing") {
  const auto lin = parse_grid("linspace:0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[0] == 0.0);
  CHECK(lin[4] == 1.0);
  CHECK(lin[2] == doctest::Approx(0.5));

  const auto lg = parse_grid("logspace:1e-4:1:5");
  REQUIRE(lg.size() == 5);
  CHECK(lg[0] == doctest::Approx(1e-4));
  CHECK(lg[4] == doctest::Approx(1.0));
  CHECK(lg[2] == doctest::Approx(1e-2).epsilon(1e-12));

  const auto list = parse_grid("0.25,0.5,1");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 0.5);

  CHECK_THROWS_AS(parse_grid("linspace:0:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("logspace:-1:1:4"), std::invalid_argument);
}

TEST_CASE("format_double uses 17 significant digits") {
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(1.0) == "1");
}
