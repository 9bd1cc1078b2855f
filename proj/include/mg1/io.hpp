#ifndef MG1_IO_HPP
#define MG1_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "mg1/verify.hpp"

namespace mg1 {

/// Chain-spec document:
///   { "M0": int, "M1": int, "B_minus1": matrix,
///     "B": { "explicit": [matrix, ...], "tail": {"gamma": x, "k0": int, "D": matrix} | null },
///     "A": { ... same ... } }
/// explicit[i] is block k = k_min + i, with k_min = -1 for A and 0 for B.
MG1Spec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const MG1Spec& spec);
MG1Spec load_spec(const std::string& path);

/// 17 significant digits, shortest form that round-trips.
std::string format_double(double x);

/// `k,i,pi` rows, phases 0-based.
void write_head_csv(std::ostream& os, const StationaryHead& head);

/// `N,tv,tv_slack,Fbar,ratio_F,tail_mass_ref,ratio_tail,const_theory`.
void write_report_csv(std::ostream& os, const ConvergenceReport& report);
nlohmann::json report_to_json(const ConvergenceReport& report);

nlohmann::json drift_to_json(const DriftReport& drift);
nlohmann::json class_diagnostics_to_json(const ClassDiagnostics& d);

}  // namespace mg1

#endif  // MG1_IO_HPP
