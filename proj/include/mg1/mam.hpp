#ifndef MG1_MAM_HPP
#define MG1_MAM_HPP

#include <string>
#include <vector>

#include "mg1/truncation.hpp"

namespace mg1 {

struct GSolution {
  Matrix G;
  int iterations = 0;
  double last_step = 0.0;  // |G_n - G_{n-1}|_inf at exit
  double residual = 0.0;   // |G - sum_m A(m) G^{m+1}|_inf
  bool monotone = true;    // G_n >= G_{n-1} entrywise at every step (to 1e-15)
};

/// Natural fixed-point iteration G_n = sum_{m=-1}^{N} A(m) G_{n-1}^{m+1}
/// from G_0 = O, each step evaluated by Horner's scheme in G_{n-1}.
GSolution compute_G(const TruncatedSpec& trunc, double tol = 1e-13, int max_iter = 1'000'000);

struct MAMFactors {
  Matrix G;
  RowVector g;
  int g_period = 0;
  double g_residual = 0.0;
  Matrix K;
  RowVector kappa;
  Matrix Phi0;
  Matrix inv_I_minus_Phi0;
  std::vector<Matrix> Rk;   // Rk[k - 1] = R(k), k = 1..N
  std::vector<Matrix> R0k;  // R0k[k - 1] = R_0(k)
  Matrix R;
  Matrix R0;
};

MAMFactors compute_factors(const TruncatedSpec& trunc, const GSolution& G);

struct Normalization {
  double total_denominator = 0.0;    // kappa e + kappa R0 (I - R)^{-1} e
  double literal_denominator = 0.0;  // kappa R0 (I - R)^{-1} e alone
  RowVector pi0_total;
  RowVector pi0_literal;
};

/// pi(0..L) of a finite-support chain plus the exact mass beyond level L.
struct StationaryHead {
  Eigen::Index M0 = 1;
  Eigen::Index M1 = 1;
  int L = 0;
  std::vector<RowVector> pis;
  double tail_mass = 0.0;             // sum_{k > L} pi(k) e
  double tail_mass_complement = 0.0;  // 1 - sum_{k <= L} pi(k) e, for cross-checking
  double min_entry_before_clamp = 0.0;
  Normalization normalization;
  std::vector<std::string> warnings;

  double level_mass(int k) const { return k <= L ? pis[static_cast<std::size_t>(k)].sum() : 0.0; }
  /// sum_{j > k} pi(j) e, including the mass beyond L.
  double mass_beyond(int k) const;
  /// sum_{j > k} pi(j), restricted to computed levels (plus nothing beyond L).
  RowVector row_beyond(int k) const;
};

/// Ramaswami's recursion pi(k) = pi(0) R0(k) + sum_{l=1}^{k-1} pi(l) R(k-l),
/// with pi(0) normalized by total mass; see Normalization.
StationaryHead ramaswami(const TruncatedSpec& trunc, const MAMFactors& factors, int L);

struct AperiodicityCheck {
  bool ok = false;
  int period = 0;
};

/// One closed class in the support of G, and that class aperiodic.
AperiodicityCheck check_g_aperiodic(const MAMFactors& factors);

struct Solution {
  GSolution g;
  MAMFactors factors;
  StationaryHead head;
};

/// li_truncate, compute_G, compute_factors and ramaswami in sequence.
Solution solve(const MG1Spec& spec, int N, int L);

}  // namespace mg1

#endif  // MG1_MAM_HPP
