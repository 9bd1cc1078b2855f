// mg1: validate, solve and verify LI truncations of M/G/1-type chains.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mg1/io.hpp"
#include "mg1/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitInput = 2;

struct RunConfig {
  std::string spec_path;
  std::string out_path;
  std::string json_path;
  int N = 1;
  int L = 0;
  std::vector<int> Ns;
  int N_ref = 0;
  int L_ref = 0;
  std::optional<double> gamma;
  double y = 1.0;
  double p = 2.0;
  double xi = 1.0;
  long cutoff = 10000;
  bool json = false;
  bool parallel = false;
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      mg1::fail(mg1::Errc::ParseError, "not an integer list: " + text);
    }
  }
  if (out.empty()) mg1::fail(mg1::Errc::ParseError, "empty integer list");
  return out;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) mg1::fail(mg1::Errc::IoError, "cannot write " + path);
  return file;
}

double default_gamma(const mg1::MG1Spec& spec, const std::optional<double>& given) {
  if (given) return *given;
  if (spec.A.tail) return spec.A.tail->gamma;
  if (spec.B.tail) return spec.B.tail->gamma;
  return 3.0;
}

int run_validate(const RunConfig& cfg) {
  const mg1::MG1Spec spec = mg1::load_spec(cfg.spec_path);
  const auto violations = mg1::validate_spec(spec);
  if (!mg1::is_valid(violations)) {
    for (const auto& v : violations)
      std::cout << (v.severity == mg1::Severity::Error ? "violation " : "warning ") << v.code << ": " << v.message << '\n';
    std::cout << "assumption1_ok = false\n";
    return kExitVerdict;
  }
  const mg1::DriftReport d = mg1::drift_report(spec);
  if (cfg.json) {
    std::cout << mg1::drift_to_json(d).dump(2) << '\n';
  } else {
    for (const auto& v : d.violations) std::cout << "warning " << v.code << ": " << v.message << '\n';
    std::cout << "varpi =";
    for (Eigen::Index i = 0; i < d.varpi.size(); ++i) std::cout << ' ' << mg1::format_double(d.varpi(i));
    std::cout << "\nmbar_A =";
    for (Eigen::Index i = 0; i < d.mbar_A.size(); ++i) std::cout << ' ' << mg1::format_double(d.mbar_A(i));
    std::cout << "\nmbar_B =";
    for (Eigen::Index i = 0; i < d.mbar_B.size(); ++i) std::cout << ' ' << mg1::format_double(d.mbar_B(i));
    std::cout << "\nsigma = " << mg1::format_double(d.sigma) << '\n'
              << "A_irreducible = " << std::boolalpha << d.A_irreducible << '\n'
              << "mbar_B_finite = " << d.mbar_B_finite << '\n'
              << "drift_negative = " << d.drift_negative << '\n'
              << "assumption1_ok = " << d.assumption1_ok << '\n';
  }
  return d.assumption1_ok ? kExitOk : kExitVerdict;
}

int run_solve(const RunConfig& cfg) {
  const mg1::MG1Spec spec = mg1::load_spec(cfg.spec_path);
  const int L = cfg.L > 0 ? cfg.L : 4 * cfg.N;
  const mg1::Solution sol = mg1::solve(spec, cfg.N, L);
  std::ofstream file;
  mg1::write_head_csv(open_out(cfg.out_path, file), sol.head);
  std::cerr << "tail_mass = " << mg1::format_double(sol.head.tail_mass) << '\n';
  for (const auto& w : sol.head.warnings) std::cerr << "warning: " << w << '\n';
  return kExitOk;
}

int run_sweep(const RunConfig& cfg) {
  const mg1::MG1Spec spec = mg1::load_spec(cfg.spec_path);
  const mg1::IntegratedTail F = mg1::integrated_tail(mg1::PowerTail{default_gamma(spec, cfg.gamma)});
  const int max_N = cfg.Ns.back();
  const int N_ref = cfg.N_ref > 0 ? cfg.N_ref : 8 * max_N;
  const int L_ref = cfg.L_ref > 0 ? cfg.L_ref : 4 * N_ref;
  const mg1::ReferenceSolution ref = mg1::reference_solution(spec, F, N_ref, L_ref, max_N);

  mg1::SweepOptions opt;
  opt.parallel = cfg.parallel;
  const mg1::ConvergenceReport rep = mg1::run_sweep(spec, F, cfg.Ns, ref, opt);

  std::ofstream file;
  mg1::write_report_csv(open_out(cfg.out_path, file), rep);

  std::string json_path = cfg.json_path;
  if (json_path.empty() && !cfg.out_path.empty() && cfg.out_path != "-") {
    json_path = cfg.out_path;
    const auto dot = json_path.rfind(".csv");
    json_path = dot != std::string::npos && dot + 4 == json_path.size() ? json_path.substr(0, dot) + ".json"
                                                                        : json_path + ".json";
  }
  if (!json_path.empty()) {
    std::ofstream js(json_path);
    if (!js) mg1::fail(mg1::Errc::IoError, "cannot write " + json_path);
    js << mg1::report_to_json(rep).dump(2) << '\n';
  }
  for (const auto& [name, v] : rep.verdicts) std::cerr << "verdict " << name << ": " << mg1::to_string(v) << '\n';
  for (const auto& f : rep.findings) std::cerr << "finding: " << f << '\n';
  return rep.any_failed() ? kExitVerdict : kExitOk;
}

void print_diagnostics(const std::string& title, const mg1::ClassDiagnostics& d) {
  std::cout << title << " (target " << mg1::format_double(d.target) << ")\n"
            << "  x,ratio\n";
  for (std::size_t i = 0; i < d.xs.size(); ++i)
    std::cout << "  " << mg1::format_double(d.xs[i]) << ',' << mg1::format_double(d.ratios[i]) << '\n';
  std::cout << "  verdict = " << std::boolalpha << d.verdict << '\n';
}

int run_tails(const RunConfig& cfg) {
  const double gamma = cfg.gamma.value_or(3.0);
  const mg1::IntegratedTail F = mg1::integrated_tail(mg1::PowerTail{gamma});
  const mg1::ExponentialTail control{};

  const auto lt = mg1::check_long_tailed(F, cfg.y);
  const auto po = mg1::check_p_order(F, cfg.p, cfg.xi);
  const auto se = mg1::check_subexponential(F, cfg.cutoff);
  const auto lt_c = mg1::check_long_tailed(control, cfg.y);
  const auto po_c = mg1::check_p_order(control, cfg.p, cfg.xi);
  const auto se_c = mg1::check_subexponential(control, cfg.cutoff);

  if (cfg.json) {
    nlohmann::json doc{{"integrated_tail",
                        {{"gamma", gamma},
                         {"long_tailed", mg1::class_diagnostics_to_json(lt)},
                         {"p_order", mg1::class_diagnostics_to_json(po)},
                         {"subexponential", mg1::class_diagnostics_to_json(se)}}},
                       {"light_tail_control",
                        {{"long_tailed", mg1::class_diagnostics_to_json(lt_c)},
                         {"p_order", mg1::class_diagnostics_to_json(po_c)},
                         {"subexponential", mg1::class_diagnostics_to_json(se_c)}}}};
    std::cout << doc.dump(2) << '\n';
  } else {
    const std::string tag = "integrated tail of (x+1)^-" + mg1::format_double(gamma);
    print_diagnostics(tag + ": long-tailed", lt);
    print_diagnostics(tag + ": p-th order long-tailed", po);
    print_diagnostics(tag + ": subexponential", se);
    print_diagnostics("control exp(-x): long-tailed", lt_c);
    print_diagnostics("control exp(-x): p-th order long-tailed", po_c);
    print_diagnostics("control exp(-x): subexponential", se_c);
  }
  const bool heavy_ok = lt.verdict && po.verdict && se.verdict;
  const bool control_rejected = !lt_c.verdict && !po_c.verdict && !se_c.verdict;
  return heavy_ok && control_rejected ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary distributions of M/G/1-type chains under level-increment truncation"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string ns_text;

  auto* validate = app.add_subcommand("validate", "check a chain spec and print its drift report");
  validate->add_option("--spec", cfg.spec_path, "chain spec JSON")->required();
  validate->add_flag("--json", cfg.json, "print the drift report as JSON");

  auto* solve = app.add_subcommand("solve", "compute pi(0..L) of the LI truncation at N; CSV k,i,pi");
  solve->add_option("--spec", cfg.spec_path, "chain spec JSON")->required();
  solve->add_option("--N", cfg.N, "truncation level increment")->required()->check(CLI::PositiveNumber);
  solve->add_option("--L", cfg.L, "highest level computed (default 4N)")->check(CLI::NonNegativeNumber);
  solve->add_option("--out", cfg.out_path, "output CSV (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "total-variation convergence sweep against a reference solution");
  sweep->add_option("--spec", cfg.spec_path, "chain spec JSON")->required();
  sweep->add_option("--Ns", ns_text, "comma-separated increasing truncation levels")->required();
  sweep->add_option("--Nref", cfg.N_ref, "reference truncation level (default 8 x max N)")->check(CLI::PositiveNumber);
  sweep->add_option("--Lref", cfg.L_ref, "reference level count (default 4 x Nref)")->check(CLI::PositiveNumber);
  sweep->add_option("--gamma", cfg.gamma, "power-tail exponent of H (default: from the spec tails)");
  sweep->add_option("--out", cfg.out_path, "report CSV (default stdout)");
  sweep->add_option("--json", cfg.json_path, "companion JSON (default next to --out)");
  sweep->add_flag("--parallel", cfg.parallel, "solve sweep points concurrently");

  auto* tails = app.add_subcommand("tails-check", "class diagnostics for the integrated power tail");
  tails->add_option("--gamma", cfg.gamma, "exponent of H (default 3)");
  tails->add_option("--y", cfg.y, "shift for the long-tailed check");
  tails->add_option("--p", cfg.p, "order for the p-th order check");
  tails->add_option("--xi", cfg.xi, "shift coefficient for the p-th order check");
  tails->add_option("--cutoff", cfg.cutoff, "discretization cutoff for the subexponential check");
  tails->add_flag("--json", cfg.json, "print diagnostics as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "ERROR Usage: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*validate) return run_validate(cfg);
    if (*solve) return run_solve(cfg);
    if (*sweep) {
      cfg.Ns = parse_int_list(ns_text);
      return run_sweep(cfg);
    }
    if (*tails) return run_tails(cfg);
  } catch (const mg1::Error& e) {
    std::cerr << "ERROR " << mg1::to_string(e.code()) << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "ERROR Internal: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
