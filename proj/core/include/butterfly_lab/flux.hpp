#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace butterfly_lab {

// Reduced rational flux p/q, gamma = 2*pi*p/q.
class FluxRational {
 public:
  FluxRational(long p, long q);

  long p() const { return p_; }
  long q() const { return q_; }
  double gamma() const { return gamma_; }
  int qi() const { return static_cast<int>(q_); }
  double fraction() const { return static_cast<double>(p_) / static_cast<double>(q_); }
  std::string str() const;

  friend bool operator==(const FluxRational& a, const FluxRational& b) {
    return a.p_ == b.p_ && a.q_ == b.q_;
  }

 private:
  long p_;
  long q_;
  double gamma_;
};

struct ThetaPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

enum class ModelKind { kSquare, kTriangular, kHexagonal, kKagome };

struct ModelSpec {
  ModelKind kind = ModelKind::kSquare;
  // Triangular only; unset means -gamma/2.
  std::optional<double> phi;
  // Kagome only.
  double omega = 0.0;
  // Square only: keep the 1/2 prefactor.
  bool harper_half_normalization = true;

  static ModelSpec square(bool half_normalization = true);
  static ModelSpec triangular(std::optional<double> phi = std::nullopt);
  static ModelSpec hexagonal();
  static ModelSpec kagome(double omega);

  double phi_for(const FluxRational& flux) const;
};

std::string_view to_string(ModelKind kind);
// Accepts square, triangular, hexagonal (alias graphene), kagome.
std::optional<ModelKind> parse_model_kind(std::string_view name);

int model_dimension(ModelKind kind, int q);

// Upper bound on the spectral radius (max absolute row sum of the model matrix).
double spectral_bound(const ModelSpec& model);

}  // namespace butterfly_lab
