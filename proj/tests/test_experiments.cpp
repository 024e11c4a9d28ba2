#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semispec/error.hpp"
#include "semispec/experiments.hpp"

using namespace semispec;
using std::numbers::pi;

namespace {

std::vector<ReducedRational> inverse_denominators(long lo, long hi) {
  std::vector<ReducedRational> hs;
  for (long q = lo; q <= hi; ++q) hs.push_back({1, q});
  return hs;
}

}  // namespace

TEST_CASE("dedupe keeps first occurrences after reduction") {
  const std::vector<ReducedRational> raw{ReducedRational::make(2, 4), {1, 3}, ReducedRational::make(3, 6), {1, 3},
                                         {2, 3}};
  const auto out = dedupe(raw);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == ReducedRational{1, 2});
  CHECK(out[1] == ReducedRational{1, 3});
  CHECK(out[2] == ReducedRational{2, 3});
}

TEST_CASE("compare") {
  const Potential v1 = builtin("v1");

  SUBCASE("h = 1 shows the discontinuity") {
    const auto rec = compare(v1, {{1, 1}});
    REQUIRE(rec.size() == 1);
    REQUIRE(rec[0].ok());
    CHECK(rec[0].min_pd == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::abs(rec[0].min_sigma) < 1e-7);
    CHECK(rec[0].D < rec[0].d);
  }

  SUBCASE("small h follows the leading asymptotic") {
    const auto rec = compare(v1, {{1, 64}, {1, 128}});
    for (const auto& r : rec) {
      REQUIRE(r.ok());
      CHECK(r.d < 1.0);
      CHECK(r.min_sigma <= r.min_pd + 1e-8);
      const double expected = pi * std::sqrt(2.0) * r.h / 16.0;
      CHECK(std::abs((1.0 - r.d) - expected) < 0.15 * expected);
    }
  }

  SUBCASE("duplicates collapse and threads do not change the output") {
    std::vector<ReducedRational> hs = inverse_denominators(8, 14);
    hs.push_back(ReducedRational::make(2, 16));
    const auto serial = compare(v1, hs, {}, {}, 1);
    const auto threaded = compare(v1, hs, {}, {}, 4);
    CHECK(serial.size() == 7);
    CHECK(comparison_table(serial).to_csv() == comparison_table(threaded).to_csv());
  }

  SUBCASE("failures are flagged, not dropped") {
    CoeffMap wide{{0, {1.0, 0.0}}, {5000, {0.1, 0.0}}, {-5000, {0.1, 0.0}}};
    const auto rec = compare(Potential("wide", wide), {{1, 8}});
    REQUIRE(rec.size() == 1);
    CHECK_FALSE(rec[0].ok());
    CHECK(std::isnan(rec[0].d));
    const Table t = comparison_table(rec);
    CHECK(t.text(0, t.column_index("status")).rfind("failed", 0) == 0);
  }

  CHECK_THROWS_AS(compare(v1, {}), Error);
  CHECK_THROWS_AS(compare(v1, {{5, 2}}), Error);
}

TEST_CASE("D(h) stays below 1 for every builtin") {
  const auto hs = inverse_denominators(8, 64);
  for (const char* name : {"v1", "v2", "v3", "v4"}) {
    CAPTURE(name);
    for (const auto& r : compare(builtin(name), hs, {}, {}, 2)) {
      CAPTURE(r.q);
      REQUIRE(r.ok());
      CHECK(r.D <= 1.0 + 1e-4);
      CHECK(r.min_sigma <= r.min_pd + 1e-8);
      CHECK(r.min_sigma >= -1e-8);
    }
  }
}

TEST_CASE("loglog_fit") {
  const std::vector<double> xs{0.5, 1.0, 2.0, 4.0, 7.0};
  std::vector<double> lin, sq, pw;
  for (double x : xs) {
    lin.push_back(x);
    sq.push_back(x * x);
    pw.push_back(3.0 * std::pow(x, 1.5));
  }
  CHECK(loglog_fit(xs, lin).slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(loglog_fit(xs, sq).slope == doctest::Approx(2.0).epsilon(1e-14));
  const FitResult f = loglog_fit(xs, pw);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.points_used == 5);

  CHECK_THROWS_AS(loglog_fit({1.0, 2.0}, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(loglog_fit({1.0, 2.0, 3.0}, {1.0, 0.0, 2.0}), Error);
  CHECK_THROWS_AS(loglog_fit({1.0, 2.0, 3.0}, {1.0, 2.0}), Error);
}

TEST_CASE("inputs_digest and geometric_grid") {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, 5.0, 6.0};
  const std::string d = inputs_digest(a, b);
  CHECK(d.size() == 16);
  CHECK(d == inputs_digest(a, b));
  CHECK(d != inputs_digest(b, a));
  CHECK(d != inputs_digest(a, {4.0, 5.0, std::nextafter(6.0, 7.0)}));

  const auto g = geometric_grid(0.01, 0.1, 10);
  REQUIRE(g.size() == 10);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 0.1);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[i + 1] / g[i]));
  CHECK_THROWS_AS(geometric_grid(0.1, 0.01, 10), Error);
}

TEST_CASE("scaling exponent of a harmonic-like well") {
  const auto res = scaling_exponent(builtin("v1"), Kinetic::Continuous, {0.002, 0.004, 0.008});
  CHECK(res.fit.slope == doctest::Approx(1.0).epsilon(0.02));
  CHECK(res.minima.size() == 3);
}

TEST_CASE("bs_vs_spec") {
  SUBCASE("continuous remainder is third order") {
    for (const char* name : {"v1", "v3"}) {
      CAPTURE(name);
      const auto rows = bs_vs_spec(builtin(name), Kinetic::Continuous, {0.02, 0.01});
      const double ratio = rows[0].diff / rows[1].diff;
      CHECK(ratio > 6.0);
      CHECK(ratio < 10.0);
      CHECK(rows[1].e_spec / rows[1].e_bs == doctest::Approx(1.0).epsilon(1e-3));
    }
    CHECK(bs_vs_spec(builtin("v3"), Kinetic::Continuous, {0.01})[0].diff < 1e-4);
  }

  SUBCASE("discrete comparison uses the rational h") {
    const auto rows = bs_vs_spec(builtin("v1"), Kinetic::Discrete, {1.0 / 64, 1.0 / 128});
    for (const auto& r : rows) CHECK(r.e_spec / r.e_bs == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(rows[1].diff < rows[0].diff);
  }

  CHECK_THROWS_AS(bs_vs_spec(builtin("v2"), Kinetic::Continuous, {0.01}), Error);
}

TEST_CASE("hoelder_check") {
  SUBCASE("constant potential") {
    const auto rep = hoelder_check(Potential("flat", {{0, {0.7, 0.0}}}), 12);
    CHECK(rep.ps.size() == 11);
    for (double r : rep.ratios) CHECK(r == doctest::Approx(0.0));
  }

  SUBCASE("V1 at q = 50 is bounded") {
    const FloquetGrids grids{32, 16, 16, 16, 1e-8};
    const auto rep = hoelder_check(builtin("v1"), 50, grids, 2);
    REQUIRE(rep.ratios.size() == 49);
    for (double r : rep.ratios) CHECK(std::isfinite(r));
    CHECK(rep.max <= 10.0 * rep.median);
    CHECK_FALSE(rep.flagged);
  }

  CHECK_THROWS_AS(hoelder_check(builtin("v1"), 1), Error);
}

TEST_CASE("discontinuity reports") {
  const double r5 = std::sqrt(5.0);

  SUBCASE("V1 at h = 1") {
    const auto rep = discontinuity_report(builtin("v1"), {1, 1});
    CHECK(rep.pass);
    CHECK(rep.min_pd - rep.min_sigma == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.max_error < 1e-6);
  }

  SUBCASE("V1 at h = 1/2") {
    const auto rep = discontinuity_report(builtin("v1"), {1, 2});
    CHECK(rep.pass);
    REQUIRE(rep.pd_bands.intervals.size() == 2);
    CHECK(std::abs(rep.min_pd - (3.0 - r5)) < 1e-6);
    CHECK(std::abs(rep.min_sigma - (3.0 - r5)) < 1e-6);
  }

  SUBCASE("V2 at h = 1 and h = 1/2") {
    for (const ReducedRational h : {ReducedRational{1, 1}, ReducedRational{1, 2}}) {
      const auto rep = discontinuity_report(builtin("v2"), h);
      CHECK(rep.pass);
      CHECK(std::abs(rep.min_pd - 1.0) < 1e-6);
      CHECK(std::abs(rep.min_sigma) < 1e-6);
    }
  }

  SUBCASE("anything else is not an oracle") {
    auto kind_of = [](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::InvalidArgument;
    };
    CHECK(kind_of([] { discontinuity_report(builtin("v3"), {1, 1}); }) == ErrorKind::NotAnOracle);
    CHECK(kind_of([] { discontinuity_report(builtin("v1"), {1, 3}); }) == ErrorKind::NotAnOracle);
  }
}

TEST_CASE("tables") {
  const TaylorWell w{1.0, 0.0, 0.0, 0.0};
  const Table bare = bs_table("harmonic", make_model(w, Kinetic::Discrete));
  CHECK(bare.row_count() == 1);
  CHECK(bare.text(0, bare.column_index("h")).empty());
  const Table with_h = bs_table("harmonic", make_model(w, Kinetic::Discrete), {0.1});
  CHECK(with_h.number(0, "E0") == doctest::Approx(0.1 - 0.01 / 16).epsilon(1e-15));
  CHECK(with_h.number(0, "d_leading") == doctest::Approx(1.0 - 0.1 / 16).epsilon(1e-15));

  HoelderReport rep;
  rep.q = 3;
  rep.ps = {1, 2};
  rep.ratios = {0.5, 0.25};
  CHECK(hoelder_table(rep).to_csv() == "p,q,r\n1,3,0.5\n2,3,0.25\n");
}
