#include "mg1/mam.hpp"

#include <algorithm>
#include <cmath>

namespace mg1 {

namespace {

// sum_{m=lo}^{hi} blocks(m) X^{m-lo}, right-multiplying Horner from the top
template <typename BlockFn>
Matrix horner(BlockFn&& block, int lo, int hi, const Matrix& X) {
  Matrix acc = block(hi);
  for (int m = hi - 1; m >= lo; --m) {
    Matrix next = block(m);
    next.noalias() += acc * X;
    acc.swap(next);
  }
  return acc;
}

Matrix g_map(const TruncatedSpec& t, const Matrix& X) {
  return horner([&](int m) -> const Matrix& { return t.a(m); }, -1, t.N, X);
}

}  // namespace

GSolution compute_G(const TruncatedSpec& trunc, double tol, int max_iter) {
  GSolution out;
  Matrix prev = Matrix::Zero(trunc.M1, trunc.M1);
  for (int n = 1; n <= max_iter; ++n) {
    Matrix next = g_map(trunc, prev);
    if ((next - prev).minCoeff() < -1e-15) out.monotone = false;
    out.last_step = inf_norm(next - prev);
    out.iterations = n;
    prev.swap(next);
    if (out.last_step <= tol) {
      out.G = prev;
      out.residual = inf_norm(out.G - g_map(trunc, out.G));
      return out;
    }
  }
  fail(Errc::NoConvergence, "compute_G: no convergence after " + std::to_string(max_iter) +
                                " iterations (last step " + num(out.last_step) + "); drift may be >= 0");
}

MAMFactors compute_factors(const TruncatedSpec& trunc, const GSolution& gsol) {
  const int N = trunc.N;
  MAMFactors f;
  f.G = gsol.G;
  f.g_residual = gsol.residual;

  const GraphAnalysis ga = graph_analysis(f.G);
  for (int c = 0; c < ga.num_classes; ++c)
    if (ga.class_closed[c]) f.g_period = ga.class_period[c];
  f.g = gth_stationary(f.G);

  // S(k) = sum_{m=0}^{N-k} A(k+m) G^m via S(k) = A(k) + S(k+1) G; S(0) = Phi(0)
  std::vector<Matrix> S(static_cast<std::size_t>(N) + 1);
  S[N] = trunc.a(N);
  for (int k = N - 1; k >= 0; --k) {
    S[k] = trunc.a(k);
    S[k].noalias() += S[k + 1] * f.G;
  }
  f.Phi0 = S[0];
  f.inv_I_minus_Phi0 = solve_i_minus(f.Phi0, Matrix::Identity(trunc.M1, trunc.M1));

  std::vector<Matrix> T(static_cast<std::size_t>(N) + 1);
  T[N] = trunc.b(N);
  for (int k = N - 1; k >= 1; --k) {
    T[k] = trunc.b(k);
    T[k].noalias() += T[k + 1] * f.G;
  }
  f.K = trunc.b(0);
  f.K.noalias() += T[1] * f.G;
  f.kappa = gth_stationary(f.K);

  f.Rk.resize(static_cast<std::size_t>(N));
  f.R0k.resize(static_cast<std::size_t>(N));
  f.R = Matrix::Zero(trunc.M1, trunc.M1);
  f.R0 = Matrix::Zero(trunc.M0, trunc.M1);
  // sum from the top so the small far blocks are added first
  for (int k = N; k >= 1; --k) {
    f.Rk[k - 1].noalias() = S[k] * f.inv_I_minus_Phi0;
    f.R0k[k - 1].noalias() = T[k] * f.inv_I_minus_Phi0;
    f.R += f.Rk[k - 1];
    f.R0 += f.R0k[k - 1];
  }
  return f;
}

double StationaryHead::mass_beyond(int k) const {
  double acc = tail_mass;
  for (int j = L; j > k; --j) acc += pis[static_cast<std::size_t>(j)].sum();
  return acc;
}

RowVector StationaryHead::row_beyond(int k) const {
  RowVector acc = RowVector::Zero(M1);
  for (int j = L; j > std::max(k, 0); --j) acc += pis[static_cast<std::size_t>(j)];
  return acc;
}

StationaryHead ramaswami(const TruncatedSpec& trunc, const MAMFactors& f, int L) {
  if (L < 0) fail(Errc::PreconditionViolation, "ramaswami: L must be nonnegative");
  const int N = trunc.N;
  const Eigen::Index m1 = trunc.M1;

  StationaryHead h;
  h.M0 = trunc.M0;
  h.M1 = m1;
  h.L = L;

  const Vector y = solve_i_minus(f.R, Vector::Ones(m1));  // (I - R)^{-1} e
  const RowVector kappa = f.kappa / f.kappa.sum();
  h.normalization.literal_denominator = (kappa * f.R0).dot(y);
  h.normalization.total_denominator = kappa.sum() + h.normalization.literal_denominator;
  h.normalization.pi0_total = kappa / h.normalization.total_denominator;
  h.normalization.pi0_literal = kappa / h.normalization.literal_denominator;
  const RowVector pi0 = h.normalization.pi0_total;

  // R stacked in reverse, block j holds R(N - j); the convolution over the
  // last n levels is then one product with the bottom n blocks.
  Matrix Rrev(static_cast<Eigen::Index>(N) * m1, m1);
  for (int j = 0; j < N; ++j) Rrev.middleRows(static_cast<Eigen::Index>(j) * m1, m1) = f.Rk[N - 1 - j];

  std::vector<double> buf(static_cast<std::size_t>(L) * m1);  // pi(1..L) back to back
  h.pis.reserve(static_cast<std::size_t>(L) + 1);
  h.pis.push_back(pi0);
  double min_entry = pi0.minCoeff();
  for (int k = 1; k <= L; ++k) {
    RowVector pk = k <= N ? RowVector(pi0 * f.R0k[k - 1]) : RowVector::Zero(m1);
    const int n = std::min(N, k - 1);
    if (n > 0) {
      const Eigen::Map<const RowVector> window(buf.data() + static_cast<std::size_t>(k - 1 - n) * m1, n * m1);
      pk.noalias() += window * Rrev.bottomRows(static_cast<Eigen::Index>(n) * m1);
    }
    min_entry = std::min(min_entry, pk.minCoeff());
    pk = pk.cwiseMax(0.0);
    std::copy(pk.data(), pk.data() + m1, buf.data() + static_cast<std::size_t>(k - 1) * m1);
    h.pis.push_back(std::move(pk));
  }
  h.min_entry_before_clamp = min_entry;
  if (min_entry < -1e-14) h.warnings.push_back("negative entry " + num(min_entry) + " clamped to 0");

  // pi_bar(L) = [pi(0) R0_bar(L) + sum_{l=1}^{L} pi(l) R_bar(L-l)] (I - R)^{-1},
  // R_bar(m) = sum_{j>m} R(j) accumulated downward from j = N
  RowVector beyond = RowVector::Zero(m1);
  Matrix rbar = Matrix::Zero(m1, m1);
  for (int m = N - 1; m >= 0; --m) {
    rbar += f.Rk[m];
    const int l = L - m;
    if (l >= 1) beyond.noalias() += h.pis[l] * rbar;
  }
  Matrix r0bar = Matrix::Zero(trunc.M0, m1);
  for (int j = N; j > L; --j) r0bar += f.R0k[j - 1];
  beyond.noalias() += pi0 * r0bar;
  h.tail_mass = std::max(0.0, beyond.dot(y));

  double head_mass = 0.0;
  for (int k = L; k >= 0; --k) head_mass += h.pis[k].sum();
  h.tail_mass_complement = 1.0 - head_mass;
  if (h.tail_mass_complement < -1e-12)
    h.warnings.push_back("head mass exceeds one by " + num(-h.tail_mass_complement));
  return h;
}

AperiodicityCheck check_g_aperiodic(const MAMFactors& factors) {
  const GraphAnalysis ga = graph_analysis(factors.G);
  AperiodicityCheck out;
  int closed = 0;
  for (int c = 0; c < ga.num_classes; ++c) {
    if (!ga.class_closed[c]) continue;
    ++closed;
    out.period = ga.class_period[c];
  }
  if (closed != 1) out.period = 0;
  out.ok = closed == 1 && out.period == 1;
  return out;
}

Solution solve(const MG1Spec& spec, int N, int L) {
  Solution s;
  const TruncatedSpec trunc = li_truncate(spec, N);
  s.g = compute_G(trunc);
  s.factors = compute_factors(trunc, s.g);
  s.head = ramaswami(trunc, s.factors, L);
  return s;
}

}  // namespace mg1
