#include <doctest.h>

#include "misport/bitset.hpp"
#include "misport/dates.hpp"
#include "misport/error.hpp"
#include "misport/parallel.hpp"
#include "misport/rng.hpp"

#include <atomic>
#include <random>
#include <set>
#include <stdexcept>

using namespace misport;

TEST_CASE("splitmix64 matches the reference outputs") {
  // Published first outputs for seed 1234567.
  SplitMix64 rng(1234567);
  CHECK(rng.next() == 6457827717110365317ULL);
  CHECK(rng.next() == 3203168211198807973ULL);
  CHECK(rng.next() == 9817491932198370423ULL);
}

TEST_CASE("uniform draws stay in range and streams differ") {
  SplitMix64 a(stream_seed(42, 0));
  SplitMix64 b(stream_seed(42, 1));
  bool differ = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(-0.1, 0.1);
    CHECK(u >= -0.1);
    CHECK(u < 0.1);
    differ = differ || a.next() != b.next();
  }
  CHECK(differ);
  CHECK(stream_seed(1, 2) == stream_seed(1, 2));
  CHECK(stream_seed(1, 2) != stream_seed(2, 1));
}

TEST_CASE("normal draws have unit moments") {
  SplitMix64 rng(9);
  const int n = 200000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("dynamic bitset set/test/count agree with std::set") {
  std::mt19937_64 gen(3);
  for (std::size_t bits : {1u, 63u, 64u, 65u, 200u}) {
    DynamicBitset b(bits);
    std::set<std::size_t> ref;
    for (int k = 0; k < 300; ++k) {
      const std::size_t i = gen() % bits;
      if (gen() % 3 == 0) {
        b.reset(i);
        ref.erase(i);
      } else {
        b.set(i);
        ref.insert(i);
      }
    }
    CHECK(b.count() == ref.size());
    std::set<std::size_t> seen;
    for_each_bit(b.words(), [&](std::size_t i) { seen.insert(i); });
    CHECK(seen == ref);
    b.set_all();
    CHECK(b.count() == bits);
    b.clear();
    CHECK(b.none());
  }
}

TEST_CASE("bit matrix popcount helpers") {
  BitMatrix m(70);
  m.set(0, 1);
  m.set(0, 69);
  m.set(5, 69);
  CHECK(m.test(0, 69));
  CHECK_FALSE(m.test(69, 0));
  CHECK(m.count() == 3);
  CHECK(popcount_and(m.row(0), m.row(5)) == 1);
  CHECK(intersects(m.row(0), m.row(5)));
  CHECK_FALSE(intersects(m.row(0), m.row(1)));
}

TEST_CASE("iso dates parse strictly") {
  CHECK(dates::parse_iso("2020-02-29").has_value());
  CHECK_FALSE(dates::parse_iso("2019-02-29").has_value());
  CHECK_FALSE(dates::parse_iso("2020-2-01").has_value());
  CHECK_FALSE(dates::parse_iso("2020/02/01").has_value());
  CHECK_FALSE(dates::parse_iso("").has_value());
  CHECK(dates::format_iso(*dates::parse_iso("2001-09-03")) == "2001-09-03");
}

TEST_CASE("business days skip weekends") {
  const auto d = dates::business_days(*dates::parse_iso("2024-01-05"), 4);  // a Friday
  REQUIRE(d.size() == 4);
  CHECK(d[0] == "2024-01-05");
  CHECK(d[1] == "2024-01-08");
  CHECK(d[3] == "2024-01-10");
}

TEST_CASE("add_months clamps to the month end") {
  CHECK(dates::add_months("2020-03-31", -1) == "2020-02-29");
  CHECK(dates::add_months("2021-03-31", -1) == "2021-02-28");
  CHECK(dates::add_months("2020-01-15", -36) == "2017-01-15");
  CHECK(dates::add_months("2020-12-10", 1) == "2021-01-10");
  CHECK(dates::month_key("2020-12-10") == "2020-12");
  CHECK_THROWS_AS(dates::add_months("bad", 1), Error);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(resolve_threads(0) >= 1);
  CHECK(resolve_threads(5) == 5);
}

TEST_CASE("error codes carry through") {
  try {
    fail(ErrorCode::SizeLimit, "too big");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeLimit);
    CHECK(std::string(e.what()).find("too big") != std::string::npos);
    CHECK(to_string(e.code()) == "size-limit");
  }
}
