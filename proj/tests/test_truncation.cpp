#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "mg1/truncation.hpp"

using mg1::Matrix;

TEST_CASE("bounded increments are left unchanged") {
  const mg1::TruncatedSpec t = mg1::li_truncate(fixtures::s1(), 1);
  CHECK(t.a(-1)(0, 0) == 0.6);
  CHECK(t.a(0)(0, 0) == 0.0);
  CHECK(t.a(1)(0, 0) == 0.4);
  CHECK(t.b(0)(0, 0) == 0.6);
  CHECK(t.b(1)(0, 0) == 0.4);
  CHECK(t.B_minus1(0, 0) == 0.6);
}

TEST_CASE("heavy tail is lumped at N") {
  const mg1::MG1Spec s = fixtures::s2();
  const mg1::TruncatedSpec t = mg1::li_truncate(s, 5);
  CHECK(t.a(5)(0, 0) == doctest::Approx(0.0024).epsilon(1e-14));
  for (int k = -1; k <= 4; ++k) CHECK(t.a(k)(0, 0) == mg1::block_at(s.A, k)(0, 0));
  CHECK(t.A.size() == 7u);  // nothing stored beyond k = N
  CHECK_THROWS_AS(mg1::li_truncate(s, 0), mg1::Error);
}

TEST_CASE("truncation conserves row mass") {
  for (const mg1::MG1Spec& s : {fixtures::s2(), fixtures::two_phase()}) {
    const Matrix A = mg1::level_sum(s.A);
    const Matrix Bsum = mg1::tail_sum_bar(s.B, 0);  // k >= 1
    for (int N : {1, 2, 5, 17, 100}) {
      const mg1::TruncatedSpec t = mg1::li_truncate(s, N);
      Matrix a = Matrix::Zero(s.M1, s.M1);
      for (int k = -1; k <= N; ++k) a += t.a(k);
      CHECK(mg1::inf_norm(a - A) <= 1e-12);
      Matrix b = Matrix::Zero(s.M0, s.M1);
      for (int k = 1; k <= N; ++k) b += t.b(k);
      CHECK(mg1::inf_norm(b - Bsum) <= 1e-12);
      CHECK(mg1::is_valid(mg1::validate_spec(t.as_spec())));
    }
  }
}

TEST_CASE("truncating a truncation at a lower level matches direct truncation") {
  const mg1::MG1Spec s = fixtures::two_phase();
  for (int M : {10, 40}) {
    const mg1::MG1Spec coarse = mg1::li_truncate(s, M).as_spec();
    for (int N : {1, 3, 10}) {
      if (N > M) continue;
      const mg1::TruncatedSpec direct = mg1::li_truncate(s, N);
      const mg1::TruncatedSpec twice = mg1::li_truncate(coarse, N);
      for (int k = -1; k <= N; ++k) CHECK(mg1::inf_norm(direct.a(k) - twice.a(k)) <= 1e-15);
      for (int k = 0; k <= N; ++k) CHECK(mg1::inf_norm(direct.b(k) - twice.b(k)) <= 1e-15);
    }
  }
}

TEST_CASE("truncated drift stays below the original and increases with N") {
  for (const mg1::MG1Spec& s : {fixtures::s2(), fixtures::two_phase()}) {
    const double sigma = mg1::drift_report(s).sigma;
    double prev = -1e300;
    for (int N : {1, 2, 4, 8, 16, 64, 256, 1024}) {
      const double sN = mg1::drift_report(mg1::li_truncate(s, N).as_spec()).sigma;
      CHECK(sN <= sigma + 1e-14);
      CHECK(sN >= prev - 1e-14);
      prev = sN;
    }
    CHECK(std::abs(prev - sigma) < 1e-2);
  }
}
