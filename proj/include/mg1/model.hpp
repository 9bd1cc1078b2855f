#ifndef MG1_MODEL_HPP
#define MG1_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "mg1/linalg.hpp"
#include "mg1/tails.hpp"

namespace mg1 {

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kSeriesTol = 1e-12;

/// Blocks D (k^{-gamma} - (k+1)^{-gamma}) for k >= k0; total mass D k0^{-gamma}.
struct PowerTailModel {
  double gamma = 2.0;
  int k0 = 1;
  Matrix D;
};

/// Level-increment blocks indexed k = k_min, k_min + 1, ...; explicit blocks
/// first, optionally followed (after a run of zero blocks) by a power tail.
/// Blocks with k <= 0 have `cols0` columns, the rest `cols` (the boundary row
/// B(0) maps level 0 to itself, whose phase count may differ).
struct BlockSequence {
  int k_min = -1;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index cols0 = 0;
  std::vector<Matrix> explicit_blocks;
  std::optional<PowerTailModel> tail;

  int explicit_end() const { return k_min + static_cast<int>(explicit_blocks.size()); }
  Eigen::Index cols_at(int k) const { return k <= 0 ? cols0 : cols; }
  /// Largest k with a possibly nonzero block; -1 + k_min when empty and no tail.
  std::optional<int> support_max() const;
};

BlockSequence a_sequence(Eigen::Index M1, std::vector<Matrix> explicit_blocks, std::optional<PowerTailModel> tail = {});
BlockSequence b_sequence(Eigen::Index M0, Eigen::Index M1, std::vector<Matrix> explicit_blocks,
                         std::optional<PowerTailModel> tail = {});

/// The M/G/1-type chain: level 0 has M0 phases, levels >= 1 have M1.
struct MG1Spec {
  Eigen::Index M0 = 1;
  Eigen::Index M1 = 1;
  Matrix B_minus1;  // M1 x M0, level 1 -> level 0
  BlockSequence B;  // k >= 0, level 0 -> level k
  BlockSequence A;  // k >= -1, level l -> level l + k
};

enum class Severity { Error, Warning };

struct Violation {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
};

/// Structural checks: shapes, nonnegativity, stochastic rows (1e-12),
/// irreducibility of A = sum A(k), gamma > 1. Irreducibility of P itself is
/// only checked through a sufficient condition and reported as a warning.
std::vector<Violation> validate_spec(const MG1Spec& spec);
bool is_valid(const std::vector<Violation>& violations);
void require_valid(const MG1Spec& spec);

Matrix block_at(const BlockSequence& seq, int k);
/// sum_{l >= N+1} block(l), exact (power tails telescope).
Matrix tail_sum_bar(const BlockSequence& seq, int N);
/// sum_{l >= N+1} tail_sum_bar(seq, l), absolute error <= abs_tol.
Matrix tail_sum_doublebar(const BlockSequence& seq, int N, double abs_tol = kSeriesTol);
/// sum over all blocks of block(k) e.
Vector row_mass(const BlockSequence& seq);
/// sum_k k block(k) e, absolute error <= abs_tol.
Vector first_moment(const BlockSequence& seq, double abs_tol = kSeriesTol);
/// A = sum_{k >= -1} A(k).
Matrix level_sum(const BlockSequence& a_seq);

struct SeriesBracket {
  double lower = 0.0;
  double upper = 0.0;
  double value() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

/// Enclosure of sum_{j >= m} j^{-gamma} (gamma > 1, m >= 1) whose width is at
/// most 2 abs_tol: partial sum up to an index M, then the Euler-Maclaurin
/// expansion through the f' term; for completely monotone summands the
/// remainder lies between 0 and the f''' term.
SeriesBracket power_series_tail(long long m, double gamma, double abs_tol = kSeriesTol);

struct DriftReport {
  Matrix A_sum;
  RowVector varpi;
  Vector mbar_A;
  double sigma = 0.0;
  Vector mbar_B;
  bool spec_valid = false;
  bool A_irreducible = false;
  bool mbar_B_finite = false;
  bool drift_negative = false;
  bool assumption1_ok = false;
  std::vector<Violation> violations;
};

DriftReport drift_report(const MG1Spec& spec);

struct TailRatioSample {
  long long N = 0;
  Vector ratio_A;
  Vector ratio_B;
};

struct Assumption3Constants {
  Vector c_A;
  Vector c_B;
  bool c_A_zero = true;
  bool c_B_zero = true;
  std::vector<TailRatioSample> diagnostics;
  std::vector<std::string> flags;
};

/// c_A = lim doublebar(A, N) e / F(N) and likewise c_B, for F the integrated
/// tail matching the sequences' power tails; closed form D e / (gamma - 1).
Assumption3Constants assumption3_constants(const MG1Spec& spec, const IntegratedTail& F,
                                           const std::vector<long long>& sample_Ns = {100, 1000, 10000});

/// Relabels phases: every block X becomes Perm^T X Perm for levels >= 1 (and
/// the matching rows/columns of boundary blocks); perm1 acts on M1 phases.
MG1Spec permute_phases(const MG1Spec& spec, const std::vector<int>& perm0, const std::vector<int>& perm1);

}  // namespace mg1

#endif  // MG1_MODEL_HPP
