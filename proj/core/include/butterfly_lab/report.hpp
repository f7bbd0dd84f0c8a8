#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace butterfly_lab {

struct IdentityCheck {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return residual <= tolerance; }
};

// Named residuals with per-check tolerances; pass() holds iff every residual is
// within its tolerance. `notes` carries reported (not checked) quantities.
class IdentityReport {
 public:
  explicit IdentityReport(std::uint64_t seed = 0) : seed_(seed) {}

  // Keeps the worst residual when a name is recorded more than once.
  void record(const std::string& name, double residual, double tolerance);
  void note(const std::string& name, double value) { notes_[name] = value; }
  // Merges checks under "prefix.name".
  void merge(const std::string& prefix, const IdentityReport& other);

  bool pass() const;
  std::vector<std::string> failed_checks() const;
  std::uint64_t seed() const { return seed_; }
  const std::map<std::string, IdentityCheck>& checks() const { return checks_; }
  const std::map<std::string, double>& notes() const { return notes_; }
  double residual(const std::string& name) const;

 private:
  std::uint64_t seed_;
  std::map<std::string, IdentityCheck> checks_;
  std::map<std::string, double> notes_;
};

nlohmann::json to_json(const IdentityReport& report);

}  // namespace butterfly_lab
