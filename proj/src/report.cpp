#include "hhrp/report.hpp"

#include "json.hpp"

#include <cmath>
#include <ostream>

namespace hhrp {

CheckRecord inequality(std::string name, std::string statement, double lhs, double rhs, double tol) {
  CheckRecord r{std::move(name), std::move(statement), lhs, rhs, rhs - lhs, false};
  r.pass = std::isfinite(r.slack) && r.slack >= -tol;
  return r;
}

CheckRecord identity(std::string name, std::string statement, double residual, double tol) {
  const double a = std::abs(residual);
  CheckRecord r{std::move(name), std::move(statement), a, 0.0, -a, false};
  r.pass = std::isfinite(a) && a <= tol;
  return r;
}

CheckRecord equality(std::string name, std::string statement, double a, double b, double tol) {
  const double d = std::abs(a - b);
  CheckRecord r{std::move(name), std::move(statement), a, b, -d, false};
  r.pass = std::isfinite(d) && d <= tol;
  return r;
}

bool all_pass(const std::vector<CheckRecord>& records) {
  for (const auto& r : records) {
    if (!r.pass) return false;
  }
  return true;
}

std::string to_json_line(const CheckRecord& record) {
  nlohmann::ordered_json j;
  j["name"] = record.name;
  j["paper_ref"] = record.paper_ref;
  j["lhs"] = record.lhs;
  j["rhs"] = record.rhs;
  j["slack"] = record.slack;
  j["pass"] = record.pass;
  return j.dump();
}

void write_json_lines(std::ostream& out, const std::vector<CheckRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace hhrp
