// Acceptance run: one PASS/FAIL line per criterion A1..A9, exit status 0 only
// if every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "mg1/tails.hpp"
#include "mg1/truncation.hpp"
#include "mg1/verify.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

const mg1::IntegratedTail kF3 = mg1::integrated_tail(mg1::PowerTail{3.0});
const std::vector<int> kSweep{50, 100, 200, 400};
constexpr int kNref = 3200;

struct OracleCheck {
  double tv = 0.0;
  double slack = 0.0;
};

OracleCheck oracle_check(const mg1::MG1Spec& spec, int N) {
  const mg1::TruncatedSpec t = mg1::li_truncate(spec, N);
  const mg1::StationaryHead oracle = mg1::oracle_solve_auto(t);
  const mg1::Solution s = mg1::solve(spec, N, oracle.L);
  const mg1::TvResult r = mg1::tv_error(s.head, oracle);
  return {r.tv, r.slack};
}

// Sweep state shared by A3..A6 (S2) and A9 (two-phase chain).
struct SweepRun {
  bool ok = false;
  std::string error;
  std::string reference_note;
  mg1::ReferenceSolution ref;
  mg1::ConvergenceReport report;
  double seconds = 0.0;
};

SweepRun run_sweep_for(const mg1::MG1Spec& spec, const std::vector<int>& tail_Ns) {
  SweepRun run;
  const auto t0 = Clock::now();
  try {
    try {
      run.ref = mg1::reference_solution(spec, kF3, kNref, 4 * kNref, kSweep.back());
      run.reference_note = "N_ref=3200 gap " + mg1::num(run.ref.stability_gap) + " <= " + mg1::num(run.ref.gap_bound);
    } catch (const mg1::Error& e) {
      if (e.code() != mg1::Errc::ReferenceUnstable) throw;
      // the prescribed remedy: double N_ref and report that it was needed
      run.reference_note = std::string("N_ref=3200 unstable (") + e.what() + "); used N_ref=6400";
      run.ref = mg1::reference_solution(spec, kF3, 2 * kNref, 8 * kNref, kSweep.back());
    }
    mg1::SweepOptions opt;
    opt.tail_Ns = tail_Ns;
    run.report = mg1::run_sweep(spec, kF3, kSweep, run.ref, opt);
    run.ok = true;
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = seconds_since(t0);
  return run;
}

Outcome a1() {
  const auto t0 = Clock::now();
  Outcome out{true, ""};
  struct Case {
    const char* name;
    mg1::MG1Spec spec;
    int N;
  };
  for (const Case& c : {Case{"S1", fixtures::s1(), 1}, Case{"S2", fixtures::s2(), 5}, Case{"S2", fixtures::s2(), 20}}) {
    const OracleCheck r = oracle_check(c.spec, c.N);
    out.pass = out.pass && r.tv <= 1e-10 + r.slack;
    out.detail += std::string(c.name) + fmt(" N=%g tv=%.2e; ", c.N, r.tv);
  }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs < 10.0;
  out.detail += fmt("%.2f s", secs);
  return out;
}

Outcome a2() {
  const mg1::Solution s = mg1::solve(fixtures::s1(), 1, 30);
  double worst = 0.0;
  for (int k = 0; k <= 30; ++k) worst = std::max(worst, std::abs(s.head.pis[k](0) - std::pow(2.0 / 3.0, k) / 3.0));
  const double pi0 = s.head.normalization.pi0_total(0);
  const double literal = s.head.normalization.pi0_literal(0);
  Outcome out;
  out.pass = worst <= 1e-12 && std::abs(pi0 - 1.0 / 3.0) <= 1e-12 && std::abs(literal - 0.5) <= 1e-12;
  out.detail = fmt("max |pi(k) - (1/3)(2/3)^k| = %.2e, pi(0) = %.15f, literal normalization = %.15f", worst, pi0, literal);
  return out;
}

Outcome a3(const SweepRun& run, double runtime_limit) {
  if (!run.ok) return {false, "sweep failed: " + run.error};
  const mg1::ConvergenceReport& r = run.report;
  const double C = r.theoretical_constant;
  const mg1::ConvergenceRow& last = r.rows.back();
  Outcome out;
  out.pass = r.verdict("tv_over_Fbar") == mg1::Verdict::Pass && run.seconds < runtime_limit;
  out.detail = fmt("ratio_F(400) = %.5f, constant = %.5f, rel dev = %.3f, positive-part ratio / constant = %.4f; ",
                   last.ratio_F, C, std::abs(last.ratio_F - C) / C, last.excess_ratio_F / C);
  out.detail += "|ratio_F - C| over last three:";
  for (std::size_t i = r.rows.size() - 3; i < r.rows.size(); ++i) out.detail += " " + mg1::num(std::abs(r.rows[i].ratio_F - C));
  out.detail += "; " + run.reference_note + fmt("; %.2f s", run.seconds);
  return out;
}

Outcome a4(const SweepRun& run) {
  if (!run.ok) return {false, "sweep failed: " + run.error};
  const mg1::ConvergenceRow& last = run.report.rows.back();
  return {run.report.verdict("tv_over_tail_mass") == mg1::Verdict::Pass,
          fmt("ratio_tail(400) = %.5f (target [0.85, 1.15])", last.ratio_tail)};
}

Outcome a5(const SweepRun& run) {
  if (!run.ok) return {false, "sweep failed: " + run.error};
  Outcome out{run.report.verdict("levelwise") == mg1::Verdict::Pass, ""};
  for (const auto& lw : run.report.rows.back().levelwise)
    out.detail += fmt("k=%g ratio/expected=%.4f min diff=%.2e; ", lw.k, lw.ratio / lw.expected, lw.min_diff);
  return out;
}

Outcome a6(const SweepRun& run) {
  if (!run.ok) return {false, "sweep failed: " + run.error};
  Outcome out{run.report.verdict("tail_over_Fbar") == mg1::Verdict::Pass, ""};
  for (const auto& c : run.report.tail_checks)
    out.detail += fmt("N=%g ratio/constant=%.4f; ", c.N, c.ratio / run.report.theoretical_constant);
  out.detail += "N_ref=" + std::to_string(run.ref.N_ref);
  return out;
}

Outcome a7() {
  const auto lt = mg1::check_long_tailed(kF3, 1.0);
  const auto po = mg1::check_p_order(kF3, 2.0, 1.0);
  const auto se = mg1::check_subexponential(kF3, 10000);
  const mg1::ExponentialTail control{};
  const auto lt_c = mg1::check_long_tailed(control, 1.0);
  const auto po_c = mg1::check_p_order(control, 2.0, 1.0);
  const auto se_c = mg1::check_subexponential(control, 10000);
  Outcome out;
  out.pass = lt.verdict && po.verdict && se.verdict && std::abs(lt.ratios.back() - 1.0) <= 1e-2 &&
             std::abs(po.ratios.back() - 1.0) <= 1e-2 && std::abs(se.ratios.back() - 2.0) <= 5e-2 && !lt_c.verdict &&
             !po_c.verdict && !se_c.verdict;
  out.detail = fmt("L ratio %.6f, L^2 ratio %.6f, S ratio %.5f", lt.ratios.back(), po.ratios.back(), se.ratios.back()) +
               fmt("; control verdicts %g/%g/%g", lt_c.verdict, po_c.verdict, se_c.verdict);
  return out;
}

Outcome a8(const std::vector<SweepRun*>& runs) {
  double g_res = 0.0, row = 0.0, kap = 0.0;
  auto track = [&](const mg1::MG1Spec& spec, int N) {
    const mg1::Solution s = mg1::solve(spec, N, 0);
    g_res = std::max(g_res, s.g.residual);
    row = std::max(row, (s.factors.G.rowwise().sum().array() - 1.0).abs().maxCoeff());
    kap = std::max(kap, mg1::inf_norm(s.factors.kappa * s.factors.K - s.factors.kappa));
  };
  track(fixtures::s1(), 1);
  for (int N : {5, 20}) track(fixtures::s2(), N);
  track(fixtures::two_phase(), 10);
  for (const mg1::MG1Spec& spec : {fixtures::s2(), fixtures::two_phase()})
    for (int N : kSweep) track(spec, N);
  for (const SweepRun* r : runs) {
    if (!r->ok) continue;
    g_res = std::max(g_res, r->ref.g_residual);
    row = std::max(row, r->ref.g_row_defect);
    kap = std::max(kap, r->ref.kappa_residual);
  }

  std::mt19937_64 rng(20240);
  double gth = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const mg1::Matrix P = fixtures::random_stochastic(5, rng);
    const mg1::RowVector x = mg1::gth_stationary(P);
    gth = std::max(gth, mg1::inf_norm(x * P - x));
  }
  Outcome out;
  out.pass = g_res <= 1e-12 && row <= 1e-10 && kap <= 1e-12 && gth <= 1e-13;
  out.detail = fmt("max G residual %.2e, max |Ge - e| %.2e, max |kappa K - kappa| %.2e, max GTH residual %.2e", g_res,
                   row, kap, gth);
  return out;
}

Outcome a9(const SweepRun& run) {
  const mg1::MG1Spec spec = fixtures::two_phase();
  const mg1::Solution s = mg1::solve(spec, 10, 10);
  const mg1::AperiodicityCheck ap = mg1::check_g_aperiodic(s.factors);
  const OracleCheck oc = oracle_check(spec, 10);
  Outcome out;
  out.detail = fmt("G period %g, oracle tv %.2e", ap.period, oc.tv);
  if (!run.ok) return {false, out.detail + "; sweep failed: " + run.error};
  const mg1::ConvergenceRow& last = run.report.rows.back();
  const double C = run.report.theoretical_constant;
  out.pass = ap.ok && oc.tv <= 1e-9 + oc.slack && run.report.verdict("tv_over_Fbar") == mg1::Verdict::Pass &&
             run.report.verdict("tv_over_tail_mass") == mg1::Verdict::Pass;
  out.detail += fmt("; ratio_F(400) = %.5f vs constant %.5f; ratio_tail(400) = %.5f; positive-part ratio / constant = %.4f",
                    last.ratio_F, C, last.ratio_tail, last.excess_ratio_F / C);
  out.detail += "; " + run.reference_note;
  return out;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  SweepRun s2_run = run_sweep_for(fixtures::s2(), {800, 1600});
  SweepRun tp_run = run_sweep_for(fixtures::two_phase(), {});

  criteria.emplace_back("A1", a1);
  criteria.emplace_back("A2", a2);
  criteria.emplace_back("A3", [&] { return a3(s2_run, 300.0); });
  criteria.emplace_back("A4", [&] { return a4(s2_run); });
  criteria.emplace_back("A5", [&] { return a5(s2_run); });
  criteria.emplace_back("A6", [&] { return a6(s2_run); });
  criteria.emplace_back("A7", a7);
  criteria.emplace_back("A8", [&] { return a8({&s2_run, &tp_run}); });
  criteria.emplace_back("A9", [&] { return a9(tp_run); });

  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s %s: %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  return all ? 0 : 1;
}
