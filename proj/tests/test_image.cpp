#include <catch_amalgamated.hpp>

#include <sstream>

#include "csgt/image.hpp"
#include "support.hpp"

using namespace csgt;

TEST_CASE("pgm roundtrip") {
  const Image img = testing::random_image(13, 7, 1);
  std::stringstream buf;
  pgm::write(buf, img);
  const Image back = pgm::read(buf);
  CHECK(back == img);
}

TEST_CASE("pgm header comments are skipped") {
  std::stringstream buf;
  buf << "P5\n# made by hand\n2 # width\n1\n255\n";
  buf.write("\x00\xff", 2);
  const Image img = pgm::read(buf);
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 1);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(0, 1) == 255.0);
}

TEST_CASE("pgm rejects what it cannot read") {
  auto parse = [](const std::string& s) {
    std::stringstream in(s);
    return pgm::read(in);
  };
  CHECK_THROWS_AS(parse("P2\n1 1\n255\n0"), DataError);
  CHECK_THROWS_AS(parse("P5\n1 1\n65535\n\0\0"), DataError);
  CHECK_THROWS_AS(parse("P5\n4 4\n255\nabc"), DataError);
  CHECK_THROWS_AS(parse("P5\n0 4\n255\n"), DataError);
  CHECK_THROWS_AS(parse("P5\n70000 1\n255\n"), DataError);
  CHECK_THROWS_AS(pgm::read_file("/nonexistent/file.pgm"), DataError);
}

TEST_CASE("image construction and range checks") {
  CHECK_THROWS_AS(Image(0, 3), UsageError);
  CHECK_THROWS_AS(Image(2, 2, std::vector<double>(3)), UsageError);
  Image img(2, 2, 10.0);
  CHECK_NOTHROW(img.validate_pixel_range());
  img.at(1, 1) = 256.0;
  CHECK_THROWS_AS(img.validate_pixel_range(), DataError);
  img.at(1, 1) = -0.5;
  CHECK_THROWS_AS(img.validate_pixel_range(), DataError);
}

TEST_CASE("crop and to_u8") {
  const Image img = testing::random_image(6, 5, 2);
  const Image c = crop(img, 3, 2);
  REQUIRE(c.width() == 3);
  REQUIRE(c.height() == 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t col = 0; col < 3; ++col) CHECK(c.at(r, col) == img.at(r, col));
  CHECK_THROWS_AS(crop(img, 7, 1), UsageError);

  CHECK(to_u8(-3.0) == 0);
  CHECK(to_u8(12.4) == 12);
  CHECK(to_u8(12.6) == 13);
  CHECK(to_u8(300.0) == 255);
}
