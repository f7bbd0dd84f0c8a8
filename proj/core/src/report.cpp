#include "butterfly_lab/report.hpp"

#include <cmath>
#include <stdexcept>

namespace butterfly_lab {

void IdentityReport::record(const std::string& name, double residual, double tolerance) {
  // NaN must never pass silently.
  if (std::isnan(residual)) residual = INFINITY;
  auto it = checks_.find(name);
  if (it == checks_.end()) {
    checks_[name] = IdentityCheck{residual, tolerance};
  } else if (residual > it->second.residual) {
    it->second.residual = residual;
  }
}

void IdentityReport::merge(const std::string& prefix, const IdentityReport& other) {
  for (const auto& [name, check] : other.checks_) record(prefix + "." + name, check.residual, check.tolerance);
  for (const auto& [name, value] : other.notes_) notes_[prefix + "." + name] = value;
}

bool IdentityReport::pass() const {
  for (const auto& [name, check] : checks_)
    if (!check.pass()) return false;
  return true;
}

std::vector<std::string> IdentityReport::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& [name, check] : checks_)
    if (!check.pass()) out.push_back(name);
  return out;
}

double IdentityReport::residual(const std::string& name) const {
  auto it = checks_.find(name);
  if (it == checks_.end()) throw std::out_of_range("no check named " + name);
  return it->second.residual;
}

nlohmann::json to_json(const IdentityReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed();
  j["pass"] = report.pass();
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, check] : report.checks()) {
    checks[name] = {{"residual", check.residual}, {"tolerance", check.tolerance}, {"pass", check.pass()}};
  }
  j["checks"] = checks;
  nlohmann::json notes = nlohmann::json::object();
  for (const auto& [name, value] : report.notes()) notes[name] = value;
  j["notes"] = notes;
  return j;
}

}  // namespace butterfly_lab
