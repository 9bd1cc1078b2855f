#include "mg1/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace mg1 {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(Errc::ParseError, where + ": matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) fail(Errc::ParseError, where + ": matrix rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(Errc::ParseError, where + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(Errc::ParseError, where + ": non-numeric entry");
      const double v = j[r][c].get<double>();
      if (!std::isfinite(v)) fail(Errc::ParseError, where + ": non-finite entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void sequence_from_json(const json& j, const std::string& name, BlockSequence& seq) {
  if (!j.is_object() || !j.contains("explicit")) fail(Errc::ParseError, name + ": expected {\"explicit\": ..., \"tail\": ...}");
  const json& ex = j.at("explicit");
  if (!ex.is_array()) fail(Errc::ParseError, name + ".explicit must be an array");
  for (std::size_t i = 0; i < ex.size(); ++i)
    seq.explicit_blocks.push_back(matrix_from_json(ex[i], name + ".explicit[" + std::to_string(i) + "]"));
  if (j.contains("tail") && !j.at("tail").is_null()) {
    const json& t = j.at("tail");
    if (!t.is_object() || !t.contains("gamma") || !t.contains("k0") || !t.contains("D"))
      fail(Errc::ParseError, name + ".tail needs gamma, k0 and D");
    if (!t.at("gamma").is_number() || !t.at("k0").is_number_integer())
      fail(Errc::ParseError, name + ".tail: gamma must be a number and k0 an integer");
    PowerTailModel tail;
    tail.gamma = t.at("gamma").get<double>();
    tail.k0 = t.at("k0").get<int>();
    tail.D = matrix_from_json(t.at("D"), name + ".tail.D");
    seq.tail = std::move(tail);
  }
}

json sequence_to_json(const BlockSequence& seq) {
  json ex = json::array();
  for (const Matrix& m : seq.explicit_blocks) ex.push_back(matrix_to_json(m));
  json tail = nullptr;
  if (seq.tail) tail = json{{"gamma", seq.tail->gamma}, {"k0", seq.tail->k0}, {"D", matrix_to_json(seq.tail->D)}};
  return json{{"explicit", std::move(ex)}, {"tail", std::move(tail)}};
}

}  // namespace

MG1Spec spec_from_json(const json& doc) {
  if (!doc.is_object()) fail(Errc::ParseError, "chain spec must be a JSON object");
  for (const char* key : {"M0", "M1", "B_minus1", "B", "A"})
    if (!doc.contains(key)) fail(Errc::ParseError, std::string("chain spec is missing \"") + key + "\"");
  if (!doc.at("M0").is_number_integer() || !doc.at("M1").is_number_integer())
    fail(Errc::ParseError, "M0 and M1 must be integers");
  const auto M0 = doc.at("M0").get<long long>();
  const auto M1 = doc.at("M1").get<long long>();
  if (M0 < 1 || M1 < 1) fail(Errc::ParseError, "M0 and M1 must be positive");

  MG1Spec s;
  s.M0 = M0;
  s.M1 = M1;
  s.B_minus1 = matrix_from_json(doc.at("B_minus1"), "B_minus1");
  s.A = a_sequence(s.M1, {});
  s.B = b_sequence(s.M0, s.M1, {});
  sequence_from_json(doc.at("A"), "A", s.A);
  sequence_from_json(doc.at("B"), "B", s.B);
  return s;
}

json spec_to_json(const MG1Spec& spec) {
  return json{{"M0", spec.M0},
              {"M1", spec.M1},
              {"B_minus1", matrix_to_json(spec.B_minus1)},
              {"B", sequence_to_json(spec.B)},
              {"A", sequence_to_json(spec.A)}};
}

MG1Spec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open chain spec " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(Errc::ParseError, path + ": " + e.what());
  }
  return spec_from_json(doc);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_head_csv(std::ostream& os, const StationaryHead& head) {
  os << "k,i,pi\n";
  for (int k = 0; k <= head.L; ++k) {
    const RowVector& p = head.pis[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < p.size(); ++i) os << k << ',' << i << ',' << format_double(p(i)) << '\n';
  }
}

void write_report_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "N,tv,tv_slack,Fbar,ratio_F,tail_mass_ref,ratio_tail,const_theory\n";
  for (const auto& r : report.rows) {
    os << r.N << ',' << format_double(r.tv) << ',' << format_double(r.tv_slack) << ',' << format_double(r.Fbar) << ','
       << format_double(r.ratio_F) << ',' << format_double(r.tail_mass_ref) << ',' << format_double(r.ratio_tail) << ','
       << format_double(report.theoretical_constant) << '\n';
  }
}

json report_to_json(const ConvergenceReport& report) {
  json verdicts = json::object();
  for (const auto& [name, v] : report.verdicts) verdicts[name] = to_string(v);

  json levelwise = json::array();
  for (const auto& r : report.rows) {
    for (const auto& lw : r.levelwise)
      levelwise.push_back({{"N", r.N}, {"k", lw.k}, {"ratio", lw.ratio}, {"expected", lw.expected}, {"min_diff", lw.min_diff}});
  }
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"N", r.N},
                    {"L", r.L},
                    {"tv", r.tv},
                    {"tv_slack", r.tv_slack},
                    {"Fbar", r.Fbar},
                    {"ratio_F", r.ratio_F},
                    {"excess_ratio_F", r.excess_ratio_F},
                    {"tail_mass_ref", r.tail_mass_ref},
                    {"ratio_tail", r.ratio_tail}});
  json tails = json::array();
  for (const auto& c : report.tail_checks)
    tails.push_back({{"N", c.N}, {"tail_mass_ref", c.tail_mass_ref}, {"Fbar", c.Fbar}, {"ratio", c.ratio}});

  return json{{"constants_detail",
               {{"c_A", vector_to_json(report.c_A)},
                {"c_B", vector_to_json(report.c_B)},
                {"sigma", report.constants.sigma},
                {"pi0_cB", report.constants.pi0_cB},
                {"pibar0_cA", report.constants.pibar0_cA},
                {"theoretical_constant", report.theoretical_constant},
                {"valid", report.constants.valid}}},
              {"reference", {{"N_ref", report.N_ref}, {"stability_gap", report.stability_gap}}},
              {"rows", std::move(rows)},
              {"levelwise", std::move(levelwise)},
              {"tail_checks", std::move(tails)},
              {"verdicts", std::move(verdicts)},
              {"verdict_tolerance_note", "finite-N tolerances are calibration values for asymptotic limits"},
              {"findings", report.findings}};
}

json drift_to_json(const DriftReport& d) {
  json violations = json::array();
  for (const auto& v : d.violations)
    violations.push_back({{"severity", v.severity == Severity::Error ? "error" : "warning"},
                          {"code", v.code},
                          {"message", v.message}});
  return json{{"varpi", vector_to_json(d.varpi.transpose())},
              {"mbar_A", vector_to_json(d.mbar_A)},
              {"sigma", d.sigma},
              {"mbar_B", vector_to_json(d.mbar_B)},
              {"assumption1_ok", d.assumption1_ok},
              {"flags",
               {{"spec_valid", d.spec_valid},
                {"A_irreducible", d.A_irreducible},
                {"mbar_B_finite", d.mbar_B_finite},
                {"drift_negative", d.drift_negative}}},
              {"violations", std::move(violations)}};
}

json class_diagnostics_to_json(const ClassDiagnostics& d) {
  return json{{"xs", d.xs},
              {"ratios", d.ratios},
              {"log_ratios", d.log_ratios},
              {"target", d.target},
              {"limit_estimate", d.limit_estimate},
              {"verdict", d.verdict}};
}

}  // namespace mg1
