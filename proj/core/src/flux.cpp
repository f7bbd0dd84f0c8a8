#include "butterfly_lab/flux.hpp"

#include <numbers>
#include <numeric>
#include <stdexcept>

namespace butterfly_lab {

FluxRational::FluxRational(long p, long q) {
  if (q == 0) throw std::invalid_argument("flux denominator must be nonzero");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const long g = std::gcd(p < 0 ? -p : p, q);
  p_ = p / g;
  q_ = q / g;
  gamma_ = 2.0 * std::numbers::pi * static_cast<double>(p_) / static_cast<double>(q_);
}

std::string FluxRational::str() const { return std::to_string(p_) + "/" + std::to_string(q_); }

ModelSpec ModelSpec::square(bool half_normalization) {
  ModelSpec m;
  m.kind = ModelKind::kSquare;
  m.harper_half_normalization = half_normalization;
  return m;
}

ModelSpec ModelSpec::triangular(std::optional<double> phi) {
  ModelSpec m;
  m.kind = ModelKind::kTriangular;
  m.phi = phi;
  return m;
}

ModelSpec ModelSpec::hexagonal() {
  ModelSpec m;
  m.kind = ModelKind::kHexagonal;
  return m;
}

ModelSpec ModelSpec::kagome(double omega) {
  ModelSpec m;
  m.kind = ModelKind::kKagome;
  m.omega = omega;
  return m;
}

double ModelSpec::phi_for(const FluxRational& flux) const {
  return phi.value_or(-flux.gamma() / 2.0);
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSquare: return "square";
    case ModelKind::kTriangular: return "triangular";
    case ModelKind::kHexagonal: return "hexagonal";
    case ModelKind::kKagome: return "kagome";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "square" || name == "harper") return ModelKind::kSquare;
  if (name == "triangular") return ModelKind::kTriangular;
  if (name == "hexagonal" || name == "graphene") return ModelKind::kHexagonal;
  if (name == "kagome" || name == "hou") return ModelKind::kKagome;
  return std::nullopt;
}

int model_dimension(ModelKind kind, int q) {
  switch (kind) {
    case ModelKind::kSquare:
    case ModelKind::kTriangular: return q;
    case ModelKind::kHexagonal: return 2 * q;
    case ModelKind::kKagome: return 3 * q;
  }
  return q;
}

double spectral_bound(const ModelSpec& model) {
  switch (model.kind) {
    case ModelKind::kSquare: return model.harper_half_normalization ? 2.0 : 4.0;
    case ModelKind::kTriangular: return 6.0;
    case ModelKind::kHexagonal: return 3.0;
    case ModelKind::kKagome: return 4.0;
  }
  return 6.0;
}

}  // namespace butterfly_lab
