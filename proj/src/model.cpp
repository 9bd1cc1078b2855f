#include "mg1/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mg1 {

namespace {

// k^{-gamma} - (k+1)^{-gamma} without cancellation for large k
double telescoped_mass(int k, double gamma) {
  const double kd = static_cast<double>(k);
  return std::pow(kd, -gamma) * -std::expm1(-gamma * std::log1p(1.0 / kd));
}

double power_tail_survivor(int m, double gamma) { return std::pow(static_cast<double>(m), -gamma); }

double max_entry(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void check_sequence(const BlockSequence& seq, const std::string& name, std::vector<Violation>& out) {
  auto error = [&](const std::string& code, const std::string& msg) {
    out.push_back({Severity::Error, code, name + ": " + msg});
  };
  for (std::size_t i = 0; i < seq.explicit_blocks.size(); ++i) {
    const int k = seq.k_min + static_cast<int>(i);
    const Matrix& blk = seq.explicit_blocks[i];
    if (blk.rows() != seq.rows || blk.cols() != seq.cols_at(k)) {
      error("Shape", "block k=" + std::to_string(k) + " is " + shape(blk) + ", expected " + std::to_string(seq.rows) +
                         "x" + std::to_string(seq.cols_at(k)));
      continue;
    }
    if (!blk.allFinite()) error("NonFinite", "block k=" + std::to_string(k) + " has a non-finite entry");
    else if ((blk.array() < 0.0).any()) error("Negative", "block k=" + std::to_string(k) + " has a negative entry");
  }
  if (seq.tail) {
    const PowerTailModel& t = *seq.tail;
    if (!(t.gamma > 1.0)) error("GammaRange", "tail gamma must exceed 1, got " + num(t.gamma));
    if (t.k0 < 1) error("TailStart", "tail k0 must be a positive integer");
    if (t.k0 < seq.explicit_end())
      error("TailOverlap", "tail starts at k0=" + std::to_string(t.k0) + " inside the explicit blocks");
    if (t.D.rows() != seq.rows || t.D.cols() != seq.cols) error("Shape", "tail coefficient block is " + shape(t.D));
    else if (!t.D.allFinite()) error("NonFinite", "tail coefficient block has a non-finite entry");
    else if ((t.D.array() < 0.0).any()) error("Negative", "tail coefficient block has a negative entry");
  }
}

bool has_shape_errors(const std::vector<Violation>& v) {
  return std::any_of(v.begin(), v.end(), [](const Violation& x) {
    return x.severity == Severity::Error && (x.code == "Shape" || x.code == "NonFinite" || x.code == "TailStart" ||
                                             x.code == "GammaRange" || x.code == "KMin");
  });
}

void check_row_sums(const Vector& sums, const std::string& code, const std::string& what, std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (std::abs(sums(i) - 1.0) > kStochasticTol) {
      std::ostringstream os;
      os.precision(17);
      os << what << " row " << i << " sums to " << sums(i);
      out.push_back({Severity::Error, code, os.str()});
    }
  }
}

}  // namespace

std::optional<int> BlockSequence::support_max() const {
  if (tail) return std::nullopt;
  for (int i = static_cast<int>(explicit_blocks.size()) - 1; i >= 0; --i)
    if (explicit_blocks[i].size() > 0 && explicit_blocks[i].cwiseAbs().maxCoeff() > 0.0) return k_min + i;
  return k_min - 1;
}

BlockSequence a_sequence(Eigen::Index M1, std::vector<Matrix> explicit_blocks, std::optional<PowerTailModel> tail) {
  BlockSequence s;
  s.k_min = -1;
  s.rows = s.cols = s.cols0 = M1;
  s.explicit_blocks = std::move(explicit_blocks);
  s.tail = std::move(tail);
  return s;
}

BlockSequence b_sequence(Eigen::Index M0, Eigen::Index M1, std::vector<Matrix> explicit_blocks,
                         std::optional<PowerTailModel> tail) {
  BlockSequence s;
  s.k_min = 0;
  s.rows = M0;
  s.cols0 = M0;
  s.cols = M1;
  s.explicit_blocks = std::move(explicit_blocks);
  s.tail = std::move(tail);
  return s;
}

Matrix block_at(const BlockSequence& seq, int k) {
  if (k < seq.k_min)
    fail(Errc::IndexOutOfDomain, "block_at: k=" + std::to_string(k) + " below k_min=" + std::to_string(seq.k_min));
  if (k < seq.explicit_end()) return seq.explicit_blocks[static_cast<std::size_t>(k - seq.k_min)];
  if (seq.tail && k >= seq.tail->k0) return seq.tail->D * telescoped_mass(k, seq.tail->gamma);
  return Matrix::Zero(seq.rows, seq.cols_at(k));
}

Matrix tail_sum_bar(const BlockSequence& seq, int N) {
  if (N < seq.k_min)
    fail(Errc::IndexOutOfDomain, "tail_sum_bar: N=" + std::to_string(N) + " below k_min=" + std::to_string(seq.k_min));
  Matrix out = Matrix::Zero(seq.rows, seq.cols_at(N + 1));
  for (int k = std::max(N + 1, seq.k_min); k < seq.explicit_end(); ++k)
    out += seq.explicit_blocks[static_cast<std::size_t>(k - seq.k_min)];
  if (seq.tail) out += seq.tail->D * power_tail_survivor(std::max(N + 1, seq.tail->k0), seq.tail->gamma);
  return out;
}

SeriesBracket power_series_tail(long long m, double gamma, double abs_tol) {
  if (!(gamma > 1.0)) fail(Errc::PreconditionViolation, "power_series_tail: gamma must exceed 1");
  if (m < 1) fail(Errc::PreconditionViolation, "power_series_tail: m must be positive");
  if (!(abs_tol >= 1e-15)) fail(Errc::ToleranceUnreachable, "power_series_tail: abs_tol below 1e-15");

  // width of the enclosure at start index M is |f'''(M)| / 720
  const double c3 = gamma * (gamma + 1.0) * (gamma + 2.0);
  const double needed = std::ceil(std::pow(c3 / (720.0 * abs_tol), 1.0 / (gamma + 3.0)));
  const long long M = std::max(m, static_cast<long long>(needed));
  if (M - m > 1'000'000)
    fail(Errc::ToleranceUnreachable, "power_series_tail: more than 1e6 explicit terms required");

  long double partial = 0.0L;
  for (long long j = M - 1; j >= m; --j) partial += std::pow(static_cast<long double>(j), -static_cast<long double>(gamma));

  const double Md = static_cast<double>(M);
  const double f = std::pow(Md, -gamma);
  const double integral = Md * f / (gamma - 1.0);
  const double d1 = -gamma * f / Md;
  const double d3 = -c3 * f / (Md * Md * Md);
  const double upper = static_cast<double>(partial + integral + 0.5 * f - d1 / 12.0);
  return SeriesBracket{upper + d3 / 720.0, upper};
}

Matrix tail_sum_doublebar(const BlockSequence& seq, int N, double abs_tol) {
  if (N < seq.k_min)
    fail(Errc::IndexOutOfDomain, "tail_sum_doublebar: N below k_min");
  if (!(abs_tol >= 1e-15)) fail(Errc::ToleranceUnreachable, "tail_sum_doublebar: abs_tol below 1e-15");
  Matrix out = Matrix::Zero(seq.rows, seq.cols_at(N + 2));
  // block j contributes to bar(l) for every l in [N+1, j-1]
  for (int k = std::max(N + 2, seq.k_min); k < seq.explicit_end(); ++k)
    out += static_cast<double>(k - 1 - N) * seq.explicit_blocks[static_cast<std::size_t>(k - seq.k_min)];
  if (seq.tail) {
    const PowerTailModel& t = *seq.tail;
    const double scale = std::max(max_entry(t.D), 1e-300);
    const double flat = static_cast<double>(std::max(0, t.k0 - 1 - N)) * power_tail_survivor(t.k0, t.gamma);
    const long long start = std::max<long long>(N + 2, static_cast<long long>(t.k0) + 1);
    const double series = power_series_tail(start, t.gamma, std::max(abs_tol / scale, 1e-15)).value();
    out += t.D * (flat + series);
  }
  return out;
}

Vector row_mass(const BlockSequence& seq) {
  Vector out = Vector::Zero(seq.rows);
  for (const Matrix& blk : seq.explicit_blocks) out += blk.rowwise().sum();
  if (seq.tail) out += seq.tail->D.rowwise().sum() * power_tail_survivor(seq.tail->k0, seq.tail->gamma);
  return out;
}

Vector first_moment(const BlockSequence& seq, double abs_tol) {
  Vector out = Vector::Zero(seq.rows);
  for (std::size_t i = 0; i < seq.explicit_blocks.size(); ++i) {
    const int k = seq.k_min + static_cast<int>(i);
    if (k != 0) out += static_cast<double>(k) * seq.explicit_blocks[i].rowwise().sum();
  }
  if (seq.tail) {
    // sum_{k >= k0} k (k^{-g} - (k+1)^{-g}) = k0^{1-g} + sum_{k >= k0+1} k^{-g}
    const PowerTailModel& t = *seq.tail;
    const Vector De = t.D.rowwise().sum();
    const double scale = std::max(De.cwiseAbs().maxCoeff(), 1e-300);
    const double moment = std::pow(static_cast<double>(t.k0), 1.0 - t.gamma) +
                          power_series_tail(t.k0 + 1LL, t.gamma, std::max(abs_tol / scale, 1e-15)).value();
    out += De * moment;
  }
  return out;
}

Matrix level_sum(const BlockSequence& a_seq) {
  return block_at(a_seq, a_seq.k_min) + tail_sum_bar(a_seq, a_seq.k_min);
}

std::vector<Violation> validate_spec(const MG1Spec& spec) {
  std::vector<Violation> out;
  auto error = [&](const std::string& code, const std::string& msg) { out.push_back({Severity::Error, code, msg}); };

  if (spec.M0 < 1 || spec.M1 < 1) {
    error("Shape", "phase counts M0, M1 must be positive");
    return out;
  }
  if (spec.A.k_min != -1) error("KMin", "A sequence must start at k = -1");
  if (spec.B.k_min != 0) error("KMin", "B sequence must start at k = 0");
  if (spec.A.rows != spec.M1 || spec.A.cols != spec.M1 || spec.A.cols0 != spec.M1)
    error("Shape", "A sequence blocks must be M1 x M1");
  if (spec.B.rows != spec.M0 || spec.B.cols0 != spec.M0 || spec.B.cols != spec.M1)
    error("Shape", "B sequence blocks must be M0 x M0 (k = 0) and M0 x M1 (k >= 1)");
  if (spec.B_minus1.rows() != spec.M1 || spec.B_minus1.cols() != spec.M0)
    error("Shape", "B(-1) is " + shape(spec.B_minus1) + ", expected M1 x M0");
  else if (!spec.B_minus1.allFinite()) error("NonFinite", "B(-1) has a non-finite entry");
  else if ((spec.B_minus1.array() < 0.0).any()) error("Negative", "B(-1) has a negative entry");

  check_sequence(spec.A, "A", out);
  check_sequence(spec.B, "B", out);
  if (has_shape_errors(out)) return out;

  const Vector a_mass = row_mass(spec.A);
  check_row_sums(row_mass(spec.B), "RowSumLevel0", "level 0", out);
  check_row_sums(spec.B_minus1.rowwise().sum() + a_mass - block_at(spec.A, -1).rowwise().sum(), "RowSumLevel1",
                 "level 1", out);
  check_row_sums(a_mass, "RowSumLevel2", "levels >= 2", out);

  const GraphAnalysis ga = graph_analysis(level_sum(spec.A));
  if (!ga.is_strongly_connected)
    error("AReducible", "A = sum A(k) has " + std::to_string(ga.num_classes) + " communicating classes");

  // Sufficient-only condition for irreducibility of P.
  bool up_from_zero = false;
  for (int k = 1; k < spec.B.explicit_end(); ++k) up_from_zero |= block_at(spec.B, k).maxCoeff() > 0.0;
  if (spec.B.tail) up_from_zero |= spec.B.tail->D.maxCoeff() > 0.0;
  const bool down_moves = block_at(spec.A, -1).maxCoeff() > 0.0 && spec.B_minus1.maxCoeff() > 0.0;
  if (!(ga.is_strongly_connected && up_from_zero && down_moves))
    out.push_back({Severity::Warning, "PIrreducibility",
                   "sufficient condition for irreducibility of P not met (A irreducible, A(-1), B(-1) and some "
                   "B(k), k >= 1, nonzero); P may still be irreducible"});
  return out;
}

bool is_valid(const std::vector<Violation>& violations) {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; });
}

void require_valid(const MG1Spec& spec) {
  const auto v = validate_spec(spec);
  if (is_valid(v)) return;
  std::string msg = "invalid chain spec";
  for (const auto& x : v)
    if (x.severity == Severity::Error) msg += "; " + x.code + ": " + x.message;
  fail(Errc::InvalidSpec, msg);
}

DriftReport drift_report(const MG1Spec& spec) {
  DriftReport r;
  r.violations = validate_spec(spec);
  r.spec_valid = is_valid(r.violations);
  if (!r.spec_valid) require_valid(spec);

  r.A_sum = level_sum(spec.A);
  r.A_irreducible = graph_analysis(r.A_sum).is_strongly_connected;
  r.varpi = gth_stationary(r.A_sum);
  r.mbar_A = first_moment(spec.A);
  r.sigma = r.varpi.dot(r.mbar_A);
  r.mbar_B = first_moment(spec.B);
  r.mbar_B_finite = r.mbar_B.allFinite();
  r.drift_negative = r.sigma < 0.0;
  r.assumption1_ok = r.spec_valid && r.A_irreducible && r.mbar_B_finite && r.drift_negative;
  return r;
}

Assumption3Constants assumption3_constants(const MG1Spec& spec, const IntegratedTail& F,
                                           const std::vector<long long>& sample_Ns) {
  require_valid(spec);
  Assumption3Constants out;

  auto limit = [&](const BlockSequence& seq, const std::string& name, bool& zero) -> Vector {
    zero = true;
    if (!seq.tail) {
      out.flags.push_back(name + ": finite support, limit is 0");
      return Vector::Zero(seq.rows);
    }
    const PowerTailModel& t = *seq.tail;
    if (std::abs(t.gamma - F.source_gamma) <= 1e-12) {
      const Vector c = t.D.rowwise().sum() / (t.gamma - 1.0);
      zero = c.maxCoeff() <= 0.0;
      if (zero) out.flags.push_back(name + ": zero tail coefficient block, limit is 0");
      return c;
    }
    if (t.gamma > F.source_gamma) {
      out.flags.push_back(name + ": tail lighter than F, limit is 0");
      return Vector::Zero(seq.rows);
    }
    fail(Errc::ExponentMismatch, name + ": tail heavier than F (gamma " + num(t.gamma) + " < " +
                                     num(F.source_gamma) + "), limit is infinite");
  };

  out.c_A = limit(spec.A, "A", out.c_A_zero);
  out.c_B = limit(spec.B, "B", out.c_B_zero);
  if (out.c_A_zero && out.c_B_zero)
    fail(Errc::ExponentMismatch, "both c_A and c_B vanish; no distribution of this family satisfies the tail condition");

  for (long long N : sample_Ns) {
    const double Fbar = survival(F, static_cast<double>(N));
    const double tol = std::clamp(1e-8 * Fbar, 1e-15, kSeriesTol);
    TailRatioSample s;
    s.N = N;
    s.ratio_A = tail_sum_doublebar(spec.A, static_cast<int>(N), tol).rowwise().sum() / Fbar;
    s.ratio_B = tail_sum_doublebar(spec.B, static_cast<int>(N), tol).rowwise().sum() / Fbar;
    out.diagnostics.push_back(std::move(s));
  }
  return out;
}

MG1Spec permute_phases(const MG1Spec& spec, const std::vector<int>& perm0, const std::vector<int>& perm1) {
  if (static_cast<Eigen::Index>(perm0.size()) != spec.M0 || static_cast<Eigen::Index>(perm1.size()) != spec.M1)
    fail(Errc::DimensionMismatch, "permute_phases: permutation sizes must match M0, M1");
  auto take = [](const Matrix& m, const std::vector<int>& rp, const std::vector<int>& cp) {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(rp[i], cp[j]);
    return out;
  };
  MG1Spec out = spec;
  out.B_minus1 = take(spec.B_minus1, perm1, perm0);
  for (auto& blk : out.A.explicit_blocks) blk = take(blk, perm1, perm1);
  if (out.A.tail) out.A.tail->D = take(spec.A.tail->D, perm1, perm1);
  for (std::size_t i = 0; i < out.B.explicit_blocks.size(); ++i) {
    const int k = out.B.k_min + static_cast<int>(i);
    out.B.explicit_blocks[i] = take(spec.B.explicit_blocks[i], perm0, k <= 0 ? perm0 : perm1);
  }
  if (out.B.tail) out.B.tail->D = take(spec.B.tail->D, perm0, perm1);
  return out;
}

}  // namespace mg1
