#include <doctest.h>

#include "hetsim/rng.hpp"

using namespace hetsim;

TEST_CASE("identical keys reproduce identical draw sequences") {
  RngStream a(42, 7, 3, StreamPurpose::channel);
  RngStream b(42, 7, 3, StreamPurpose::channel);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("key components separate the streams") {
  RngStream base(42, 7, 3, StreamPurpose::channel);
  RngStream seed(43, 7, 3, StreamPurpose::channel);
  RngStream t(42, 8, 3, StreamPurpose::channel);
  RngStream m(42, 7, 4, StreamPurpose::channel);
  RngStream purpose(42, 7, 3, StreamPurpose::pattern);
  const auto x = base.next_u64();
  CHECK(x != seed.next_u64());
  CHECK(x != t.next_u64());
  CHECK(x != m.next_u64());
  CHECK(x != purpose.next_u64());
}

TEST_CASE("uniform draws stay strictly inside (0,1)") {
  RngStream rng(1, 0, 0, StreamPurpose::channel);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("exponential draws have unit mean") {
  RngStream rng(5, 0, 0, StreamPurpose::channel);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("normal draws have zero mean and unit variance") {
  RngStream rng(9, 0, 0, StreamPurpose::shadowing);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("poisson draws match the mean") {
  RngStream rng(11, 0, 0, StreamPurpose::topology);
  double sum = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) sum += rng.poisson(2.0);
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.05));
}
