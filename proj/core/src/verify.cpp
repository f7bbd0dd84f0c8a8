#include "butterfly_lab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "butterfly_lab/bands.hpp"
#include "butterfly_lab/chambers.hpp"
#include "butterfly_lab/charpoly.hpp"
#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/lattice.hpp"
#include "butterfly_lab/semiclassical.hpp"

namespace butterfly_lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string label(const ModelSpec& m, const FluxRational& f) {
  return std::string(to_string(m.kind)) + "_" + std::to_string(f.p()) + "_" + std::to_string(f.q());
}

IdentityReport band_properties(const ModelSpec& model, const FluxRational& flux, std::uint64_t seed) {
  IdentityReport rep(seed);
  FitOptions fit;
  fit.seed = seed;
  fit.enforce_tolerance = false;
  const ChambersForm form = extract_chambers(model, flux, fit);
  rep.record("chambers_residual", chambers_residual(form, 50, seed), 1e-8);
  rep.record("sine_couplings_vanish", sine_coupling_size(form), 1e-8);

  BandStructure bs;
  CouplingRange range;
  try {
    range = coupling_range(form);
    BandOptions bo;
    try {
      bs = bands_from_chambers(form, range, bo);
    } catch (const NumericalError&) {
      bo.route = EdgeRoute::kExtremal;
      bs = bands_from_chambers(form, range, bo);
    }
  } catch (const NumericalError&) {
    rep.record("chambers_bands", 1.0, 0.0);
    return rep;
  }
  rep.record("count", std::abs(bs.total_multiplicity() - form.dim), 0.0);

  double overlap = 0.0;
  double monotone = 0.0;
  const Band* prev = nullptr;
  for (const Band& b : bs.bands) {
    if (b.flat) continue;
    if (prev) overlap = std::max(overlap, prev->hi - b.lo - 1e-8);
    prev = &b;
    if (b.hi - b.lo > 1e-8 && !(monotonicity_margin(form, range.structure, b) > 1e-12)) monotone = 1.0;
  }
  rep.record("non_overlap", std::max(overlap, 0.0), 0.0);
  rep.record("monotone_interior", monotone, 0.0);

  if (model.kind == ModelKind::kHexagonal) {
    std::vector<double> edges;
    for (const Band& b : index_bands(bs)) {
      edges.push_back(b.lo);
      edges.push_back(b.hi);
    }
    std::sort(edges.begin(), edges.end());
    double sym = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) sym = std::max(sym, std::abs(edges[k] + edges[edges.size() - 1 - k]));
    rep.record("graphene_edge_symmetry", sym, 1e-9);
  }

  const auto cmp = compare_with_grid(bs, bands_from_grid(model, flux, 101));
  rep.record("grid_oracle_ratio", cmp.worst_ratio, 1.0);
  return rep;
}

}  // namespace

IdentityReport run_verification(const VerifyOptions& options) {
  IdentityReport rep(options.seed);
  std::mt19937_64 rng(options.seed);

  // Symmetries, conjugation identities and the exhaustive trace identity for every q <= qmax.
  std::uniform_real_distribution<double> omega_dist(0.0, 2.0 * kPi / 3.0);
  for (long q = 1; q <= options.qmax; ++q) {
    for (long p = 0; p < std::max(q, 2L); ++p) {
      if (std::gcd(p, q) != 1) continue;
      const FluxRational flux(p, q);
      rep.merge("symmetry." + flux.str(), verify_symmetries(flux, omega_dist(rng), options.samples, rng()));
    }
  }
  rep.merge("symmetry.3/2_pi_8", verify_symmetries(FluxRational(3, 2), kPi / 8.0, options.samples, options.seed));

  for (auto [p, q] : {std::pair{0L, 1L}, {1L, 2L}, {1L, 3L}, {2L, 5L}})
    rep.merge("graphene_factorization." + FluxRational(p, q).str(),
              graphene_factorization_check(FluxRational(p, q), 100, options.seed));

  // Kagome structure: the fixed worked cases plus random draws.
  std::vector<std::pair<FluxRational, double>> kagome = {
      {FluxRational(0, 1), 0.0}, {FluxRational(3, 2), kPi / 8.0}, {FluxRational(1, 3), 0.4}};
  std::uniform_int_distribution<long> qd(1, 8);
  for (int i = 0; i < 6; ++i) {
    const long q = qd(rng);
    long p = std::uniform_int_distribution<long>(0, 2 * q - 1)(rng);
    while (std::gcd(p, q) != 1) ++p;
    kagome.emplace_back(FluxRational(p, q), omega_dist(rng));
  }
  for (std::size_t i = 0; i < kagome.size(); ++i) {
    const auto& [flux, omega] = kagome[i];
    rep.merge("kagome_theorem." + std::to_string(i) + "." + flux.str(),
              verify_kagome_theorem(flux, omega, options.samples, options.seed));
  }

  const std::vector<std::pair<ModelSpec, FluxRational>> band_cases = {
      {ModelSpec::kagome(kPi / 8.0), FluxRational(3, 2)}, {ModelSpec::kagome(0.0), FluxRational(0, 1)},
      {ModelSpec::kagome(0.4), FluxRational(1, 3)},       {ModelSpec::hexagonal(), FluxRational(1, 2)},
      {ModelSpec::hexagonal(), FluxRational(2, 5)},       {ModelSpec::triangular(), FluxRational(1, 6)},
      {ModelSpec::square(), FluxRational(1, 2)},          {ModelSpec::square(), FluxRational(2, 5)}};
  for (const auto& [model, flux] : band_cases)
    rep.merge("bands." + label(model, flux), band_properties(model, flux, options.seed));

  const SubprincipalReport sc = subprincipal_report(options.semiclassical_grid);
  IdentityReport semi(options.seed);
  semi.record("derivative_formula", sc.max_derivative_error, 1e-6);
  semi.record("kernel_correction", sc.max_correction_error, 1e-5);
  semi.record("decomposition", sc.max_decomposition_error, 1e-5);
  semi.record("min_subprincipal", std::abs(sc.min_subprincipal + 0.75), 1e-6);
  semi.record("max_subprincipal", std::abs(sc.max_subprincipal), 1e-6);
  semi.record("kernel_block", sc.max_kernel_block, 1e-12);
  semi.record("block_spectrum", sc.max_block_spectrum_violation, 1e-9);
  semi.record("u0_unitary", sc.max_unitarity_defect, 1e-12);
  semi.record("u0_continuity", sc.max_u0_jump, 0.5);
  semi.record("middle_eigenvalue_inside", sc.middle_gap_margin > 0.0 ? 0.0 : 1.0, 0.0);
  const BandHull hull = effective_band_hull(0.01, 64);
  semi.record("hull_lo", std::abs(hull.lo + 0.0075), 1e-4);
  semi.record("hull_hi", std::abs(hull.hi), 1e-4);
  rep.merge("semiclassical", semi);

  if (options.fault) {
    const double measured = rep.checks().count(options.fault->check) ? rep.residual(options.fault->check) : 0.0;
    const double tol = rep.checks().count(options.fault->check) ? rep.checks().at(options.fault->check).tolerance : 0.0;
    rep.record(options.fault->check, measured + options.fault->residual, tol);
  }
  return rep;
}

}  // namespace butterfly_lab
