#include <catch2/catch_amalgamated.hpp>

#include "cohspec/dsl.hpp"
#include "cohspec/prover.hpp"
#include "cohspec/transforms.hpp"

using namespace cohspec;

TEST_CASE("smoke: parse and enumerate a tiny theory") {
  Theory th = parse_theory("theory bare\nsort A\n");
  REQUIRE(well_formed(th).empty());
  ModelClass cls = enumerate_models(th, 2);
  REQUIRE(cls.models.size() == 3);
}
