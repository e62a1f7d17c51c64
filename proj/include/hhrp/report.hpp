#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hhrp {

/// One verified statement. `slack` is rhs - lhs for inequalities lhs <= rhs and
/// -|residual| for identities; a record passes iff slack >= -tolerance.
struct CheckRecord {
  std::string name;
  std::string paper_ref;  // the statement being checked, in plain math
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// lhs <= rhs up to `tol`.
CheckRecord inequality(std::string name, std::string statement, double lhs, double rhs, double tol);
/// |residual| <= tol, recorded with lhs = |residual| and rhs = 0.
CheckRecord identity(std::string name, std::string statement, double residual, double tol);
/// a == b up to `tol`.
CheckRecord equality(std::string name, std::string statement, double a, double b, double tol);

bool all_pass(const std::vector<CheckRecord>& records);

/// One JSON object per line: {name, paper_ref, lhs, rhs, slack, pass}.
void write_json_lines(std::ostream& out, const std::vector<CheckRecord>& records);
std::string to_json_line(const CheckRecord& record);

}  // namespace hhrp
