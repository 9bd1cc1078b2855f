#ifndef MG1_TRUNCATION_HPP
#define MG1_TRUNCATION_HPP

#include <vector>

#include "mg1/model.hpp"

namespace mg1 {

/// Level-increment truncation P^(N): jumps longer than N are lumped onto
/// jump size N. Blocks are materialized, A for k = -1..N and B for k = 0..N.
struct TruncatedSpec {
  int N = 1;
  Eigen::Index M0 = 1;
  Eigen::Index M1 = 1;
  Matrix B_minus1;
  std::vector<Matrix> A;  // A[k + 1] = A^(N)(k)
  std::vector<Matrix> B;  // B[k] = B^(N)(k)

  const Matrix& a(int k) const { return A[static_cast<std::size_t>(k + 1)]; }
  const Matrix& b(int k) const { return B[static_cast<std::size_t>(k)]; }

  /// The same chain as an MG1Spec with finite-support sequences.
  MG1Spec as_spec() const;
};

TruncatedSpec li_truncate(const MG1Spec& spec, int N);

}  // namespace mg1

#endif  // MG1_TRUNCATION_HPP
