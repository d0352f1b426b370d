#include "mdlmd/rng.hpp"

#include <doctest.h>

#include <set>

using namespace mdlmd;

TEST_CASE("derive_seed is a pure function of master and path") {
  CHECK(derive_seed(7, {1, 2}) == derive_seed(7, {1, 2}));
  CHECK(derive_seed(7, {1, 2}) != derive_seed(7, {2, 1}));
  CHECK(derive_seed(7, {1}) != derive_seed(8, {1}));
  CHECK(derive_seed(7, {}) != derive_seed(7, {0}));
}

TEST_CASE("child seeds of one master do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(derive_seed(123, {a, b}));
  CHECK(seen.size() == 1000);
}

TEST_CASE("make_rng streams repeat") {
  Rng a = make_rng(5, {stream::kBootstrap, 3}), b = make_rng(5, {stream::kBootstrap, 3});
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}
