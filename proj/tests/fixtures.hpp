#ifndef MG1_TESTS_FIXTURES_HPP
#define MG1_TESTS_FIXTURES_HPP

// Chains shared by the unit tests and the acceptance run.

#include <random>
#include <string>

#include "mg1/io.hpp"
#include "mg1/model.hpp"

namespace fixtures {

using mg1::Matrix;

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

inline std::string data_path(const std::string& name) { return std::string(MG1_DATA_DIR) + "/" + name; }

// Birth-death chain: down 0.6, up 0.4, pi(k) = (1/3)(2/3)^k.
inline mg1::MG1Spec s1() {
  mg1::MG1Spec s;
  s.B_minus1 = scalar(0.6);
  s.B = mg1::b_sequence(1, 1, {scalar(0.6), scalar(0.4)});
  s.A = mg1::a_sequence(1, {scalar(0.6), scalar(0.0), scalar(0.4)});
  return s;
}

inline mg1::PowerTailModel power_tail(double gamma, double d, int k0 = 1) {
  return mg1::PowerTailModel{gamma, k0, scalar(d)};
}

// Scalar heavy-tailed chain: down 0.7, up-jump k >= 1 with mass 0.3 (k^-g - (k+1)^-g).
inline mg1::MG1Spec s2(double gamma = 3.0) {
  mg1::MG1Spec s;
  s.B_minus1 = scalar(0.7);
  s.B = mg1::b_sequence(1, 1, {scalar(0.7)}, power_tail(gamma, 0.3));
  s.A = mg1::a_sequence(1, {scalar(0.7), scalar(0.0)}, power_tail(gamma, 0.3));
  return s;
}

inline mg1::MG1Spec two_phase() { return mg1::load_spec(data_path("two_phase.json")); }

// Random irreducible row-stochastic matrix with strictly positive entries.
inline Matrix random_stochastic(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Matrix P(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i, j) = u(rng);
  for (int i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
  return P;
}

}  // namespace fixtures

#endif  // MG1_TESTS_FIXTURES_HPP
