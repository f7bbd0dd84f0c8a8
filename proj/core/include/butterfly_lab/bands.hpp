#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "butterfly_lab/chambers.hpp"
#include "butterfly_lab/flux.hpp"

namespace butterfly_lab {

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool flat = false;
  int multiplicity = 1;
  // Grid method: max eigenvalue jump between neighbouring grid points.
  double resolution = 0.0;
};

enum class EdgeRoute { kCompanion, kExtremal, kGrid };
std::string_view to_string(EdgeRoute route);

struct BandStructure {
  std::vector<Band> bands;
  std::vector<double> touching_points;
  FluxRational flux{0, 1};
  ModelSpec model;
  EdgeRoute route = EdgeRoute::kCompanion;
  std::string multiplicity_convention;

  int total_multiplicity() const;
};

// Couplings proportional to one reference polynomial: coupling_i = ratio_i * reference,
// so det = base + g(theta) * reference with g = sum_i ratio_i * pattern_i.
struct CouplingStructure {
  CouplingPattern reference = CouplingPattern::kCosDiff;
  std::array<double, 6> ratios{};
  double misfit = 0.0;

  double g(double a, double b) const;
};

// Throws NumericalError when the couplings are not proportional within `tolerance`.
CouplingStructure coupling_structure(const ChambersForm& form, double tolerance = 1e-6);

struct CouplingRange {
  double gmin = 0.0;
  double gmax = 0.0;
  ThetaPoint argmin;
  ThetaPoint argmax;
  CouplingStructure structure;
  // Closed-form pattern recognised from the ratios ("" when none).
  std::string closed_form;
};

// Extremes of g over the torus: 512x512 scan plus compass refinement, cross-checked
// against closed forms for the cos A + cos B (+-cos(A - B)) families.
CouplingRange coupling_range(const ChambersForm& form);

struct BandOptions {
  EdgeRoute route = EdgeRoute::kCompanion;
  ThetaPoint theta_sample{0.37, 1.13};
  // Companion edges must match Hermitian eigenvalues at the extremizers to this (x (1 + |lambda|)).
  double edge_check_tolerance = 1e-6;
  double flat_tolerance = 1e-7;
  double touch_tolerance = 1e-8;
};

// Edges from the real roots of base + gmin*R and base + gmax*R. Throws NumericalError
// when the root route cannot be certified.
BandStructure bands_from_chambers(const ChambersForm& form, const CouplingRange& range,
                                  const BandOptions& options = {});

// Brute-force oracle: per sorted index, min/max over the n x n grid of [0, 2 pi/q)^2 and its
// copy shifted by half a step.
BandStructure bands_from_grid(const ModelSpec& model, const FluxRational& flux, int n, int threads = 0);

// t(lambda) = -base/R for a band structure built on `form`.
double coupling_level(const ChambersForm& form, const CouplingStructure& structure, double lambda);

// Interior monotonicity of t = -base/R on a non-flat band: the smallest normalised
// Wronskian s * (base' R - base R') / (|base'| |R| + |base| |R'|) over `samples` interior
// points, s fixed by the first point. Positive means t' never vanishes there.
double monotonicity_margin(const ChambersForm& form, const CouplingStructure& structure, const Band& band,
                           int samples = 64);

struct FlatBandTest {
  bool flat = false;
  double residual = 0.0;
  double lambda_star = 0.0;
  double tolerance = 0.0;
};

// Kagome: is base_omega(-2 cos(3 omega - gamma/8)) zero?
FlatBandTest flat_band_test(const FluxRational& flux, double omega);

// All omega in [0, 2 pi/3) with a flat band.
std::vector<double> flat_band_omegas(const FluxRational& flux, int samples = 4096);

// Per-eigenvalue-index edges: bands expanded by multiplicity, sorted by (lo, hi).
std::vector<Band> index_bands(const BandStructure& bs);

// Exact edges against the grid oracle: every edge within factor * (grid resolution of that
// index) + slack. ratio is the worst |error| / allowance.
struct OracleComparison {
  double max_edge_error = 0.0;
  double worst_ratio = 0.0;
  bool pass = false;
};
OracleComparison compare_with_grid(const BandStructure& exact, const BandStructure& grid, double factor = 3.0,
                                   double slack = 1e-9);

struct Gap {
  double lo = 0.0;
  double hi = 0.0;
  bool closed = false;
};

std::vector<Gap> gap_report(const BandStructure& bs, double closed_tolerance = 1e-8);

nlohmann::json to_json(const BandStructure& bs);
nlohmann::json to_json(const std::vector<Gap>& gaps);
nlohmann::json to_json(const CouplingRange& range);

}  // namespace butterfly_lab
