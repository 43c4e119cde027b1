#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lyapscope/diagnostics.hpp"
#include "lyapscope/exponents.hpp"

using namespace lyap;

TEST_CASE("cat map with Lebesgue: measured exponent gives unit unstable dimension") {
  // h equals the exponent for this map's volume measure; the exponent itself
  // is measured along an orbit
  const double h = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  const auto est = top_exponent(SurfaceMap::cat(), {0.37, 0.18}, golden_theta(), 400);
  const MeasureReport r{h, est.lambda_plus, est.lambda_minus};
  CHECK(std::fabs(unstable_dim(r) - 1.0) < 1e-3);
  CHECK(std::fabs(pressure(r)) < 1e-3);
  CHECK(srb_flag(r));
}

TEST_CASE("dimension formulas: symmetric Anosov, degenerate, and generic inputs") {
  const MeasureReport anosov{0.9624, 0.9624, -0.9624};
  CHECK(hausdorff_dim(anosov) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unstable_dim(anosov) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pressure(anosov) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(srb_flag(anosov));

  CHECK(hausdorff_dim({0.0, 1.0, -1.0}) == 0.0);
  CHECK(unstable_dim({0.0, 1.0, -1.0}) == 0.0);
  CHECK(pressure({0.0, 1.0, -1.0}) == -1.0);

  CHECK(hausdorff_dim({0.5, 1.0, -2.0}) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(hausdorff_dim({0.5, -1.0, -2.0}), InvalidArgument);
}

TEST_CASE("definition-level identity: HD = delta_u + h/|lambda-|") {
  std::mt19937_64 rng(3);
  auto u = [&] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 500; ++i) {
    const MeasureReport r{u(), 0.1 + u(), -0.1 - u()};
    CHECK(std::fabs(hausdorff_dim(r) - (unstable_dim(r) + r.h / std::fabs(r.lambda_minus))) <
          1e-12);
  }
}

TEST_CASE("main_identity_check: continuous sequences pass both flags") {
  const MeasureReport limit{0.96, 0.96, -0.96};
  SequenceReport s;
  for (int k = 1; k <= 12; ++k) s.member_reports.push_back(limit);
  s.limit_report = limit;
  s.beta = 1.0;
  const auto v = main_identity_check(s, limit, 4.0, {0.0, 0.0});
  CHECK(v.exponent_identity);
  CHECK(v.entropy_inequality);
}

TEST_CASE("main_identity_check: rejects an injected 10x-tolerance violation") {
  const MeasureReport limit{0.96, 0.96, -0.96};
  SequenceReport s;
  for (int k = 1; k <= 12; ++k) {
    MeasureReport m = limit;
    m.lambda_plus += 10.0 * 0.02;  // ten times the exponent tolerance
    s.member_reports.push_back(m);
  }
  s.limit_report = limit;
  s.beta = 1.0;
  const auto v = main_identity_check(s, limit, 4.0, {0.0, 0.0});
  CHECK_FALSE(v.exponent_identity);

  SequenceReport bad_h = s;
  for (auto& m : bad_h.member_reports) {
    m.lambda_plus = limit.lambda_plus;
    m.h = limit.h + 10.0 * 0.1;
  }
  const auto vh = main_identity_check(bad_h, limit, 1e9, {0.0, 0.0});
  CHECK_FALSE(vh.entropy_inequality);
}

TEST_CASE("variant_bound_check: continuity and zero-entropy reductions") {
  const MeasureReport mu{0.8, 1.1, -0.5};
  SequenceReport cont;
  for (int k = 0; k < 8; ++k) cont.member_reports.push_back(mu);
  CHECK(variant_bound_check(cont, mu));

  // lim h = 0: bound reduces to lambda+ - lim lambda+ <= |lambda-|
  SequenceReport zero;
  for (int k = 0; k < 8; ++k) zero.member_reports.push_back({0.0, mu.lambda_plus - 0.4, 0.0});
  CHECK(variant_bound_check(zero, mu));
  SequenceReport toofar;
  for (int k = 0; k < 8; ++k) toofar.member_reports.push_back({0.0, mu.lambda_plus - 0.7, 0.0});
  CHECK_FALSE(variant_bound_check(toofar, mu));
}

TEST_CASE("variant bound is sharper than the unsymmetrized one when |l-| < l+") {
  std::mt19937_64 rng(11);
  auto u = [&] { return (rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 300; ++i) {
    const double lp = 0.5 + u();
    const double lm = -(0.05 + 0.4 * u());  // |lambda-| < lambda+
    const double h = 0.1 + 0.8 * u();
    const double lim_h = h * u();
    const MeasureReport mu{h, lp, lm};
    const double strong = std::fabs(lm) * (1.0 - lim_h / h);
    CHECK(strong <= gold_variant_rhs(mu, lim_h) + 1e-12);
  }
}

TEST_CASE("ruelle gate on algebraic reports") {
  const MeasureReport r{0.9, 0.96, -0.96};
  CHECK(r.h <= r.lambda_plus + 0.05);
  CHECK(pressure(r) <= 0.05);
}
