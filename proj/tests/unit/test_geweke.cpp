#include "doctest.h"
#include "geweke.hpp"

TEST_CASE("successive-conditional simulation matches forward simulation") {
  const auto stats = testing::geweke::run(31, 33, 4000, 100);
  // Bonferroni at overall level 0.01
  const double level = 0.01 / static_cast<double>(stats.size());
  for (const auto& s : stats) {
    INFO(s.name << " p = " << s.p_value);
    CHECK(s.p_value > level);
  }
}
