#include <fstream>

#include "doctest.h"
#include "nlbash/porter2.hpp"

using nlbash::porter2_stem;

TEST_CASE("porter2 examples") {
  CHECK(porter2_stem("files") == "file");
  CHECK(porter2_stem("running") == "run");
  CHECK(porter2_stem("generously") == "generous");
  CHECK(porter2_stem("directories") == "directori");
  CHECK(porter2_stem("skies") == "sky");
  CHECK(porter2_stem("a") == "a");
  CHECK(porter2_stem("") == "");
  CHECK(porter2_stem("*.java") == "*.java");
}

TEST_CASE("porter2 agrees with the reference implementation") {
  std::ifstream in(std::string(NLBASH_TEST_DIR) + "/golden/porter2.tsv");
  REQUIRE(in.good());
  std::string line;
  std::size_t rows = 0;
  std::size_t mismatches = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    const auto word = line.substr(0, tab);
    const auto expected = line.substr(tab + 1);
    ++rows;
    const auto got = porter2_stem(word);
    if (got != expected) {
      if (++mismatches <= 20) {
        CAPTURE(word);
        CHECK(got == expected);
      }
    }
  }
  CHECK(rows > 50000);
  CHECK(mismatches == 0);
}
