#include <doctest.h>

#include <random>
#include <vector>

#include "ssrv/rng.hpp"
#include "test_support.hpp"

using ssrv::RngStream;

TEST_CASE("splitmix64 matches the published reference outputs") {
    // First two outputs of the reference generator started at state 0.
    CHECK(ssrv::splitmix64(0) == 0xE220A8397B1DCDAFull);
    CHECK(ssrv::splitmix64(0x9E3779B97F4A7C15ull) == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("derive_stream depends on argument order") {
    CHECK(ssrv::derive_stream(1, 2) == 0xE06DD043328BD285ull);
    CHECK(ssrv::derive_stream(2, 1) == 0xBCD9DBB49673066Bull);
}

TEST_CASE("underlying engine conforms to the standard") {
    // The 10000th output of a default-seeded mt19937_64 is pinned by the
    // standard; a toolchain that fails this breaks every frozen value here.
    std::mt19937_64 eng;
    for (int i = 0; i < 9999; ++i) eng();
    CHECK(eng() == 9981545732273789042ull);
}

TEST_CASE("identical ids give identical sequences") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream c(42, 8);
    CHECK(RngStream(42, 7).next_u64() != c.next_u64());
}

TEST_CASE("child identity ignores parent consumption") {
    RngStream parent(1, 2);
    RngStream before = parent.child(5);
    for (int i = 0; i < 100; ++i) parent.next_u64();
    RngStream after = parent.child(5);
    for (int i = 0; i < 16; ++i) CHECK(before.next_u64() == after.next_u64());

    // Distinct children are distinct streams.
    CHECK(parent.child(0).next_u64() != parent.child(1).next_u64());
}

TEST_CASE("uniform variants respect bounds") {
    RngStream rng(3, 1);
    double mean = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        mean += u;
    }
    mean /= n;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));

    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform_int is in range and unbiased across buckets") {
    RngStream rng(3, 2);
    const std::uint64_t n = 7;
    std::vector<int> hist(n, 0);
    const int draws = 140000;
    for (int i = 0; i < draws; ++i) {
        const auto v = rng.uniform_int(n);
        REQUIRE(v < n);
        ++hist[v];
    }
    for (auto h : hist) CHECK(h == doctest::Approx(draws / 7.0).epsilon(0.05));
    for (int i = 0; i < 100; ++i) CHECK(rng.uniform_int(1) == 0);
    CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("normal transform has standard moments") {
    RngStream rng(3, 3);
    const int n = 200000;
    std::vector<double> v(n);
    int below = 0;
    for (auto& x : v) {
        x = rng.normal();
        below += x < 0.0;
    }
    const auto m = ssrv::test::moments(v);
    CHECK(std::fabs(m.mean) < 0.01);
    CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(static_cast<double>(below) / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gamma transform matches moments in both shape regimes") {
    RngStream rng(3, 4);
    const int n = 200000;

    std::vector<double> small(n);
    for (auto& x : small) {
        x = rng.gamma(0.5);
        REQUIRE(x > 0.0);
    }
    const auto ms = ssrv::test::moments(small);
    CHECK(ms.mean == doctest::Approx(0.5).epsilon(0.02));
    CHECK(ms.var == doctest::Approx(0.5).epsilon(0.05));

    std::vector<double> big(n);
    for (auto& x : big) x = rng.gamma(3.0);
    const auto mb = ssrv::test::moments(big);
    CHECK(mb.mean == doctest::Approx(3.0).epsilon(0.01));
    CHECK(mb.var == doctest::Approx(3.0).epsilon(0.03));

    CHECK_THROWS_AS(rng.gamma(0.0), std::invalid_argument);
}
