#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "fixtures.hpp"
#include "mg1/model.hpp"

using mg1::Matrix;
using mg1::Vector;

namespace {

bool has_code(const std::vector<mg1::Violation>& v, const std::string& code) {
  for (const auto& x : v)
    if (x.code == code && x.severity == mg1::Severity::Error) return true;
  return false;
}

// Hurwitz zeta(3, a) = -psi''(a) / 2, independent of the library's series code.
double hurwitz3(double a) { return -0.5 * boost::math::polygamma(2, a); }

}  // namespace

TEST_CASE("validate_spec accepts the reference chains") {
  CHECK(mg1::is_valid(mg1::validate_spec(fixtures::s1())));
  CHECK(mg1::is_valid(mg1::validate_spec(fixtures::s2())));
  CHECK(mg1::is_valid(mg1::validate_spec(fixtures::two_phase())));
}

TEST_CASE("validate_spec reports violations") {
  mg1::MG1Spec bad = fixtures::s1();
  bad.A.explicit_blocks[2] = fixtures::scalar(0.5);
  const auto v = mg1::validate_spec(bad);
  CHECK_FALSE(mg1::is_valid(v));
  CHECK(has_code(v, "RowSumLevel2"));
  CHECK_THROWS_AS(mg1::require_valid(bad), mg1::Error);

  mg1::MG1Spec light = fixtures::s2();
  light.A.tail->gamma = 0.9;
  CHECK(has_code(mg1::validate_spec(light), "GammaRange"));

  mg1::MG1Spec neg = fixtures::s1();
  neg.B_minus1 = fixtures::scalar(-0.1);
  CHECK(has_code(mg1::validate_spec(neg), "Negative"));

  mg1::MG1Spec overlap = fixtures::s2();
  overlap.A.explicit_blocks.push_back(fixtures::scalar(0.0));  // explicit k = 1 collides with k0 = 1
  CHECK(has_code(mg1::validate_spec(overlap), "TailOverlap"));
}

TEST_CASE("block_at") {
  CHECK(mg1::block_at(fixtures::s1().A, 1)(0, 0) == 0.4);
  const mg1::BlockSequence tail = mg1::a_sequence(1, {fixtures::scalar(0.7), fixtures::scalar(0.0)},
                                                  fixtures::power_tail(3.0, 0.3));
  CHECK(mg1::block_at(tail, 2)(0, 0) == doctest::Approx(0.3 * (1.0 / 8.0 - 1.0 / 27.0)).epsilon(1e-15));
  CHECK(mg1::block_at(fixtures::s1().A, 7)(0, 0) == 0.0);
  CHECK_THROWS_AS(mg1::block_at(fixtures::s1().A, -2), mg1::Error);
}

TEST_CASE("tail_sum_bar") {
  CHECK(mg1::tail_sum_bar(fixtures::s1().A, 0)(0, 0) == 0.4);
  CHECK(mg1::tail_sum_bar(fixtures::s1().A, 3)(0, 0) == 0.0);
  const mg1::MG1Spec s = fixtures::s2();
  for (int N : {0, 1, 4, 10, 1000}) {
    const double expected = 0.3 * std::pow(N + 1.0, -3.0);
    CHECK(mg1::tail_sum_bar(s.A, N)(0, 0) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("tail sums telescope") {
  for (const mg1::MG1Spec& s : {fixtures::s2(), fixtures::two_phase()}) {
    for (int N = -1; N < 60; ++N) {
      const Matrix diff = mg1::tail_sum_bar(s.A, N) - mg1::tail_sum_bar(s.A, N + 1);
      CHECK(mg1::inf_norm(diff - mg1::block_at(s.A, N + 1)) <= 1e-15);
    }
    const double tol = 1e-12;
    for (int N = 1; N < 60; ++N) {
      const Matrix diff = mg1::tail_sum_doublebar(s.A, N - 1, tol) - mg1::tail_sum_doublebar(s.A, N, tol);
      CHECK(mg1::inf_norm(diff - mg1::tail_sum_bar(s.A, N)) <= 2 * tol);
    }
  }
}

TEST_CASE("tail_sum_doublebar") {
  CHECK(mg1::tail_sum_doublebar(fixtures::s1().A, 0)(0, 0) == 0.0);

  const mg1::BlockSequence unit = mg1::a_sequence(1, {fixtures::scalar(0.0), fixtures::scalar(0.0)},
                                                  fixtures::power_tail(3.0, 1.0));
  // bar(l) = (l + 1)^-3, so the double bar at N is zeta(3, N + 2)
  for (int N : {0, 1, 10, 100, 1000}) {
    const double got = mg1::tail_sum_doublebar(unit, N, 1e-12)(0, 0);
    CHECK(std::abs(got - hurwitz3(N + 2.0)) <= 1e-12);
  }
  double prev = 0.0;
  for (int N : {1000, 10000, 100000}) {
    const double scaled = mg1::tail_sum_doublebar(unit, N, 1e-15)(0, 0) * N * N;
    CHECK(std::abs(scaled - 0.5) < 2.0 / N);
    CHECK(std::abs(scaled - 0.5) <= std::abs(prev - 0.5) + (prev == 0.0 ? 1.0 : 0.0));
    prev = scaled;
  }
}

TEST_CASE("power_series_tail brackets the Hurwitz zeta tail") {
  for (double gamma : {1.5, 2.0, 3.0, 4.0}) {
    for (long long m : {1LL, 2LL, 10LL, 100LL}) {
      const mg1::SeriesBracket b = mg1::power_series_tail(m, gamma, 1e-12);
      CHECK(b.width() <= 1e-12);
      const double exact = gamma == 3.0 ? hurwitz3(static_cast<double>(m))
                                        : boost::math::zeta(gamma) - [&] {
                                            double s = 0.0;
                                            for (long long j = 1; j < m; ++j) s += std::pow(double(j), -gamma);
                                            return s;
                                          }();
      CHECK(exact >= b.lower - 1e-14);
      CHECK(exact <= b.upper + 1e-14);
    }
  }
  CHECK_THROWS_AS(mg1::power_series_tail(1, 3.0, 1e-16), mg1::Error);
  CHECK_THROWS_AS(mg1::power_series_tail(1, 1.0, 1e-12), mg1::Error);
}

TEST_CASE("drift_report") {
  const mg1::DriftReport s1 = mg1::drift_report(fixtures::s1());
  CHECK(s1.varpi(0) == doctest::Approx(1.0));
  CHECK(s1.mbar_A(0) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(s1.sigma == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(s1.assumption1_ok);

  const mg1::DriftReport s2 = mg1::drift_report(fixtures::s2());
  const double expected = -0.7 + 0.3 * boost::math::zeta(3.0);
  CHECK(std::abs(s2.sigma - expected) <= 1e-12);
  CHECK(s2.assumption1_ok);

  // upward drift: down 0.3, up 0.7
  mg1::MG1Spec up;
  up.B_minus1 = fixtures::scalar(0.3);
  up.B = mg1::b_sequence(1, 1, {fixtures::scalar(0.3), fixtures::scalar(0.7)});
  up.A = mg1::a_sequence(1, {fixtures::scalar(0.3), fixtures::scalar(0.0), fixtures::scalar(0.7)});
  const mg1::DriftReport u = mg1::drift_report(up);
  CHECK(u.sigma > 0.0);
  CHECK_FALSE(u.assumption1_ok);
}

TEST_CASE("level sum is stationary-solvable for accepted specs") {
  for (const mg1::MG1Spec& s : {fixtures::s1(), fixtures::s2(), fixtures::two_phase()}) {
    const Matrix A = mg1::level_sum(s.A);
    CHECK(mg1::inf_norm(A.rowwise().sum() - Vector::Ones(s.M1)) <= 1e-12);
    CHECK_NOTHROW(mg1::gth_stationary(A));
  }
}

TEST_CASE("drift is invariant under phase relabeling") {
  const mg1::MG1Spec s = fixtures::two_phase();
  const mg1::MG1Spec p = mg1::permute_phases(s, {1, 0}, {1, 0});
  CHECK(mg1::is_valid(mg1::validate_spec(p)));
  CHECK(std::abs(mg1::drift_report(s).sigma - mg1::drift_report(p).sigma) <= 1e-14);
}

TEST_CASE("assumption3_constants") {
  const mg1::IntegratedTail F = mg1::integrated_tail(mg1::PowerTail{3.0});
  const mg1::Assumption3Constants c = mg1::assumption3_constants(fixtures::s2(), F);
  CHECK(c.c_A(0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(c.c_B(0) == doctest::Approx(0.15).epsilon(1e-15));

  // finite-support B: c_B = 0, flagged
  mg1::MG1Spec mixed = fixtures::s2();
  mixed.B = mg1::b_sequence(1, 1, {fixtures::scalar(0.7), fixtures::scalar(0.3)});
  const mg1::Assumption3Constants m = mg1::assumption3_constants(mixed, F);
  CHECK(m.c_B(0) == 0.0);
  CHECK(m.c_B_zero);
  CHECK_FALSE(m.flags.empty());

  try {
    mg1::assumption3_constants(fixtures::s1(), F);
    FAIL("expected ExponentMismatch");
  } catch (const mg1::Error& e) {
    CHECK(e.code() == mg1::Errc::ExponentMismatch);
  }
}

TEST_CASE("tail ratio diagnostics converge to the closed form") {
  for (double gamma : {2.5, 3.0, 4.0}) {
    const mg1::IntegratedTail F = mg1::integrated_tail(mg1::PowerTail{gamma});
    const mg1::Assumption3Constants c = mg1::assumption3_constants(fixtures::s2(gamma), F);
    const double closed = 0.3 / (gamma - 1.0);
    double prev_gap = 1e300;
    for (const auto& s : c.diagnostics) {
      const double gap = std::abs(s.ratio_A(0) - closed);
      CHECK(gap <= prev_gap);
      prev_gap = gap;
      if (s.N == 10000) CHECK(gap <= 0.01 * closed);
    }
  }
}
