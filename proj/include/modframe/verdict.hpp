#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace modframe {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class CertStatus { Certified, Falsified, Undetermined };

const char* to_string(CertStatus s);

/// Outcome of a positivity or domination test. Three-valued on purpose:
/// Certified and Falsified both come with evidence (margin, witness);
/// anything the tolerances cannot decide stays Undetermined rather than
/// being rounded to a boolean.
struct Verdict {
  CertStatus status = CertStatus::Undetermined;
  /// Signed smallest eigenvalue of the decisive Hermitian object.
  double margin = 0.0;
  /// Direction achieving the violation (eigenvector or module coordinates).
  std::optional<CVec> witness;
  /// Evaluated algebra-valued violation at the witness, when meaningful.
  std::optional<CMat> violation;
  std::string detail;

  bool certified() const { return status == CertStatus::Certified; }
  bool falsified() const { return status == CertStatus::Falsified; }
  bool undetermined() const { return status == CertStatus::Undetermined; }
};

Verdict certified_verdict(double margin, std::string detail = {});
Verdict falsified_verdict(double margin, CVec witness, std::string detail = {});
Verdict undetermined_verdict(double margin, std::string detail = {});

/// Conjunction: Certified only if both are; Falsified wins over
/// Undetermined and keeps the worse margin's evidence.
Verdict combine_verdicts(const Verdict& a, const Verdict& b);

}  // namespace modframe
