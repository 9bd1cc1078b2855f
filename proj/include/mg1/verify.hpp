#ifndef MG1_VERIFY_HPP
#define MG1_VERIFY_HPP

#include <string>
#include <utility>
#include <vector>

#include "mg1/mam.hpp"

namespace mg1 {

struct TvResult {
  double tv = 0.0;     // sum over computed levels of |a - b|
  double slack = 0.0;  // a.tail_mass + b.tail_mass
  double excess = 0.0; // sum over computed levels of max(a - b, 0)
};

/// Total-variation distance over the union of computed levels; levels one
/// head lacks count as zero there.
TvResult tv_error(const StationaryHead& a, const StationaryHead& b);

/// Stationary distribution of P^(N) on levels 0..L_cap with every transition
/// above L_cap redirected to L_cap (same phase), solved densely by GTH. The
/// returned tail_mass is a geometric extrapolation of the head decay and must
/// not exceed 1e-10.
StationaryHead oracle_solve_finite(const TruncatedSpec& trunc, int L_cap);

/// Grows L_cap from 8N until the extrapolated tail is below target.
StationaryHead oracle_solve_auto(const TruncatedSpec& trunc, double target = 1e-12, Eigen::Index max_states = 6000);

struct ReferenceSolution {
  int N_ref = 0;
  int L_ref = 0;
  StationaryHead head;
  double stability_gap = 0.0;  // tv (+ slack) between the N_ref and 2 N_ref solutions
  double gap_bound = 0.0;      // ref_tol * F(max sweep N)
  bool g_aperiodic = false;
  int g_period = 0;
  double g_residual = 0.0;
  double g_row_defect = 0.0;
  double kappa_residual = 0.0;
};

ReferenceSolution reference_solution(const MG1Spec& spec, const IntegratedTail& F, int N_ref, int L_ref,
                                     int max_sweep_N, double ref_tol = 0.01);

struct ConstantDetail {
  double value = 0.0;
  double pi0_cB = 0.0;
  double pibar0_cA = 0.0;
  double sigma = 0.0;
  bool valid = false;  // false when c_A and c_B both vanish
};

/// (pi(0) c_B + pi_bar(0) c_A) / (-sigma).
ConstantDetail theoretical_constant(const RowVector& pi0, const RowVector& pibar0, const Vector& c_A, const Vector& c_B,
                                    double sigma);
ConstantDetail theoretical_constant(const ReferenceSolution& ref, const Vector& c_A, const Vector& c_B, double sigma);

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct LevelwiseRatio {
  int k = 0;
  double ratio = 0.0;     // (pi^(N)(k) - pi_ref(k)) e / F(N)
  double expected = 0.0;  // constant * pi_ref(k) e
  double min_diff = 0.0;  // min entry of pi^(N)(k) - pi_ref(k)
};

struct ConvergenceRow {
  int N = 0;
  int L = 0;
  double tv = 0.0;
  double tv_slack = 0.0;
  double Fbar = 0.0;
  double ratio_F = 0.0;
  double tail_mass_ref = 0.0;
  double ratio_tail = 0.0;
  double excess_ratio_F = 0.0;  // positive part of pi^(N) - pi_ref over F(N)
  std::vector<LevelwiseRatio> levelwise;
};

struct TailRatioCheck {
  int N = 0;
  double tail_mass_ref = 0.0;
  double Fbar = 0.0;
  double ratio = 0.0;  // pi_ref_bar(N) e / F(N), compared to constant * varpi e
};

struct SweepOptions {
  int L_multiplier = 4;
  std::vector<int> levelwise_ks{0, 1, 5};
  std::vector<int> tail_Ns;  // reference tail-ratio checks; empty means {2 max N, 4 max N}
  double rel_tol = 0.15;     // finite-N calibration of asymptotic limits
  bool parallel = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double theoretical_constant = 0.0;
  ConstantDetail constants;
  Vector c_A;
  Vector c_B;
  std::vector<TailRatioCheck> tail_checks;
  std::vector<std::pair<std::string, Verdict>> verdicts;
  std::vector<std::string> findings;
  double stability_gap = 0.0;
  int N_ref = 0;

  Verdict verdict(const std::string& name) const;
  bool any_failed() const;
};

ConvergenceReport run_sweep(const MG1Spec& spec, const IntegratedTail& F, const std::vector<int>& Ns,
                            const ReferenceSolution& ref, const SweepOptions& options = {});

}  // namespace mg1

#endif  // MG1_VERIFY_HPP
