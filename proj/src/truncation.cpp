#include "mg1/truncation.hpp"

namespace mg1 {

MG1Spec TruncatedSpec::as_spec() const {
  MG1Spec s;
  s.M0 = M0;
  s.M1 = M1;
  s.B_minus1 = B_minus1;
  s.A = a_sequence(M1, A);
  s.B = b_sequence(M0, M1, B);
  return s;
}

TruncatedSpec li_truncate(const MG1Spec& spec, int N) {
  if (N < 1) fail(Errc::PreconditionViolation, "li_truncate: N must be at least 1");
  require_valid(spec);

  TruncatedSpec t;
  t.N = N;
  t.M0 = spec.M0;
  t.M1 = spec.M1;
  t.B_minus1 = spec.B_minus1;
  t.A.reserve(static_cast<std::size_t>(N) + 2);
  for (int k = -1; k < N; ++k) t.A.push_back(block_at(spec.A, k));
  t.A.push_back(tail_sum_bar(spec.A, N - 1));
  t.B.reserve(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k < N; ++k) t.B.push_back(block_at(spec.B, k));
  t.B.push_back(tail_sum_bar(spec.B, N - 1));
  return t;
}

}  // namespace mg1
