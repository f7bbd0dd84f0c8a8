#include "butterfly_lab/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "butterfly_lab/charpoly.hpp"
#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/parallel.hpp"
#include "butterfly_lab/roots.hpp"

namespace butterfly_lab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScan = 512;

struct KnownPattern {
  const char* name;
  std::array<double, 3> cos_ratios;
  double gmin;
  double gmax;
};

constexpr KnownPattern kKnownPatterns[] = {
    {"cosA+cosB", {1, 1, 0}, -2.0, 2.0},
    {"-(cosA+cosB)", {-1, -1, 0}, -2.0, 2.0},
    {"cosA+cosB+cos(A-B)", {1, 1, 1}, -1.5, 3.0},
    {"-(cosA+cosB+cos(A-B))", {-1, -1, -1}, -3.0, 1.5},
    {"cosA+cosB-cos(A-B)", {1, 1, -1}, -3.0, 1.5},
    {"-(cosA+cosB-cos(A-B))", {-1, -1, 1}, -1.5, 3.0},
};

// Local compass search on g starting from (a, b).
std::array<double, 3> refine_extremum(const CouplingStructure& s, double a, double b, bool maximize) {
  const double sign = maximize ? -1.0 : 1.0;
  double best = sign * s.g(a, b);
  double step = 2.0 * kPi / kScan;
  const int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  int guard = 0;
  while (step > 1e-14 && guard++ < 10000) {
    bool moved = false;
    for (const auto& d : dirs) {
      const double na = a + d[0] * step;
      const double nb = b + d[1] * step;
      const double v = sign * s.g(na, nb);
      if (v < best) {
        best = v;
        a = na;
        b = nb;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {a, b, sign * best};
}


// Removes the `count` entries of v closest to x.
void remove_nearest(std::vector<double>& v, double x, int count) {
  for (int c = 0; c < count && !v.empty(); ++c) {
    auto it = std::min_element(v.begin(), v.end(),
                               [x](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
    v.erase(it);
  }
}

int count_near(const std::vector<double>& v, double x, double tol) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [&](double y) { return std::abs(y - x) <= tol; }));
}

// Newton on the exact evaluator; steps that do not shrink |E| are rejected.
double polish_root(const ChambersForm& form, const Eigen::VectorXd& w, double x, double max_step) {
  auto [v, d] = form.combination_value_and_slope(w, x);
  for (int it = 0; it < 8 && v != 0.0 && d != 0.0; ++it) {
    double step = v / d;
    if (std::abs(step) > max_step) return x;
    const double xn = x - step;
    const auto [vn, dn] = form.combination_value_and_slope(w, xn);
    if (!(std::abs(vn) < std::abs(v))) break;
    x = xn;
    v = vn;
    d = dn;
  }
  return x;
}

std::vector<double> companion_edges(const ChambersForm& form, const RealPolynomial& poly, const Eigen::VectorXd& w) {
  double deviation = 0.0;
  for (double x : RealPolynomial::chebyshev_nodes(2 * form.dim + 3, poly.lo(), poly.hi()))
    deviation = std::max(deviation, std::abs(poly(x) - form.combination_value(w, x)));
  RootOptions options;
  options.value_noise =
      std::max(4.0 * deviation, 64.0 * std::numeric_limits<double>::epsilon() * poly.coefficient_norm());
  const RootResult roots = polynomial_roots(poly, options);
  if (!roots.all_real() || static_cast<int>(roots.real.size()) != form.dim) {
    throw NumericalError("companion route: expected " + std::to_string(form.dim) + " real roots, found " +
                         std::to_string(roots.real.size()) + " real and " + std::to_string(roots.complex.size()) +
                         " complex");
  }
  std::vector<double> edges = roots.real;
  const double width = poly.hi() - poly.lo();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const bool repeated = (i > 0 && roots.real[i - 1] == roots.real[i]) ||
                          (i + 1 < edges.size() && roots.real[i + 1] == roots.real[i]);
    if (repeated) continue;
    double spacing = width;
    if (i > 0) spacing = std::min(spacing, roots.real[i] - roots.real[i - 1]);
    if (i + 1 < edges.size()) spacing = std::min(spacing, roots.real[i + 1] - roots.real[i]);
    edges[i] = polish_root(form, w, roots.real[i], 0.25 * spacing);
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<double> to_vector(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

std::string_view to_string(EdgeRoute route) {
  switch (route) {
    case EdgeRoute::kCompanion: return "chambers-companion";
    case EdgeRoute::kExtremal: return "chambers-extremal";
    case EdgeRoute::kGrid: return "grid";
  }
  return "unknown";
}

int BandStructure::total_multiplicity() const {
  int n = 0;
  for (const auto& b : bands) n += b.multiplicity;
  return n;
}

double CouplingStructure::g(double a, double b) const {
  double v = 0.0;
  for (std::size_t k = 0; k < kAllPatterns.size(); ++k)
    if (ratios[k] != 0.0) v += ratios[k] * pattern_value(kAllPatterns[k], a, b);
  return v;
}

CouplingStructure coupling_structure(const ChambersForm& form, double tolerance) {
  const std::vector<double> x = form.sample_abscissae(2 * form.dim + 16);
  const int n = static_cast<int>(x.size());
  std::array<TermSamples, 6> samples;
  std::array<double, 6> resolved{};
  double scale = 0.0;
  for (std::size_t k = 0; k < kAllPatterns.size(); ++k) {
    samples[k] = form.sample_combination(form.coupling_weights(kAllPatterns[k]), x);
    // Magnitude a coupling provably reaches once rounding noise is discounted.
    for (int i = 0; i < n; ++i)
      resolved[k] = std::max(resolved[k], std::abs(samples[k].value[i]) - 4.0 * samples[k].noise[i]);
    scale = std::max(scale, resolved[k]);
  }
  if (scale <= 0.0) throw NumericalError("coupling structure: all couplings vanish");
  auto significant = [&](CouplingPattern p) { return resolved[static_cast<std::size_t>(p)] > 1e-7 * scale; };

  CouplingStructure s;
  if (significant(CouplingPattern::kCosDiff)) {
    s.reference = CouplingPattern::kCosDiff;
  } else if (significant(CouplingPattern::kCosTheta1)) {
    s.reference = CouplingPattern::kCosTheta1;
  } else {
    s.reference = kAllPatterns[std::max_element(resolved.begin(), resolved.end()) - resolved.begin()];
  }
  const auto& ref = samples[static_cast<std::size_t>(s.reference)];
  for (std::size_t k = 0; k < kAllPatterns.size(); ++k) {
    const auto prop = proportionality(samples[k], ref);
    s.ratios[k] = prop.kappa;
    s.misfit = std::max(s.misfit, prop.residual);
  }
  if (!(s.misfit <= tolerance)) {
    throw NumericalError("couplings are not proportional to a common polynomial (misfit " + std::to_string(s.misfit) +
                         ")");
  }
  return s;
}

CouplingRange coupling_range(const ChambersForm& form) {
  CouplingRange range;
  range.structure = coupling_structure(form);
  const auto& s = range.structure;

  std::vector<double> c(kScan);
  std::vector<double> sn(kScan);
  for (int i = 0; i < kScan; ++i) {
    c[i] = std::cos(2.0 * kPi * i / kScan);
    sn[i] = std::sin(2.0 * kPi * i / kScan);
  }
  const auto& r = s.ratios;
  double best_min = INFINITY;
  double best_max = -INFINITY;
  int imin[2] = {0, 0};
  int imax[2] = {0, 0};
  for (int i = 0; i < kScan; ++i)
    for (int j = 0; j < kScan; ++j) {
      const int d = (i - j + kScan) % kScan;
      const double v = r[0] * c[i] + r[1] * c[j] + r[2] * c[d] + r[3] * sn[i] + r[4] * sn[j] + r[5] * sn[d];
      if (v < best_min) {
        best_min = v;
        imin[0] = i;
        imin[1] = j;
      }
      if (v > best_max) {
        best_max = v;
        imax[0] = i;
        imax[1] = j;
      }
    }
  const double h = 2.0 * kPi / kScan;
  const auto lo = refine_extremum(s, h * imin[0], h * imin[1], false);
  const auto hi = refine_extremum(s, h * imax[0], h * imax[1], true);
  range.gmin = lo[2];
  range.gmax = hi[2];
  const int q = form.flux.qi();
  range.argmin = {lo[0] / q, lo[1] / q};
  range.argmax = {hi[0] / q, hi[1] / q};

  const bool no_sines = std::abs(r[3]) < 1e-6 && std::abs(r[4]) < 1e-6 && std::abs(r[5]) < 1e-6;
  for (const auto& known : kKnownPatterns) {
    if (!no_sines) break;
    if (std::abs(r[0] - known.cos_ratios[0]) < 1e-6 && std::abs(r[1] - known.cos_ratios[1]) < 1e-6 &&
        std::abs(r[2] - known.cos_ratios[2]) < 1e-6) {
      range.closed_form = known.name;
      if (std::abs(range.gmin - known.gmin) > 1e-5 || std::abs(range.gmax - known.gmax) > 1e-5) {
        throw NumericalError("coupling range scan disagrees with the closed form for " + range.closed_form);
      }
    }
  }
  return range;
}

double coupling_level(const ChambersForm& form, const CouplingStructure& structure, double lambda) {
  return -form.base_value(lambda) / form.coupling_value(structure.reference, lambda);
}

BandStructure bands_from_chambers(const ChambersForm& form, const CouplingRange& range, const BandOptions& options) {
  const auto& s = range.structure;
  const Eigen::VectorXd w_ref = form.coupling_weights(s.reference);
  const Eigen::VectorXd w_lo = form.base_weights() + range.gmin * w_ref;
  const Eigen::VectorXd w_hi = form.base_weights() + range.gmax * w_ref;
  const RealVector ev_lo = model_eigenvalues(form.model, form.flux, range.argmin);
  const RealVector ev_hi = model_eigenvalues(form.model, form.flux, range.argmax);

  std::vector<double> roots_lo;
  std::vector<double> roots_hi;
  if (options.route == EdgeRoute::kCompanion) {
    const RealPolynomial& ref = form.coupling(s.reference);
    roots_lo = companion_edges(form, form.base + range.gmin * ref, w_lo);
    roots_hi = companion_edges(form, form.base + range.gmax * ref, w_hi);
    // The extreme-level polynomials are det(lambda - M) at the extremizers.
    for (int k = 0; k < form.dim; ++k) {
      const double tol_lo = options.edge_check_tolerance * (1.0 + std::abs(ev_lo(k)));
      const double tol_hi = options.edge_check_tolerance * (1.0 + std::abs(ev_hi(k)));
      if (std::abs(roots_lo[k] - ev_lo(k)) > tol_lo || std::abs(roots_hi[k] - ev_hi(k)) > tol_hi) {
        throw NumericalError("companion edges disagree with eigenvalues at the coupling extremizers");
      }
    }
  } else if (options.route == EdgeRoute::kExtremal) {
    roots_lo = to_vector(ev_lo);
    roots_hi = to_vector(ev_hi);
  } else {
    throw std::invalid_argument("bands_from_chambers: grid route is bands_from_grid");
  }

  BandStructure bs;
  bs.flux = form.flux;
  bs.model = form.model;
  bs.route = options.route;
  bs.multiplicity_convention = "spectral count within 1e-7 at theta=(" + std::to_string(options.theta_sample.theta1) +
                               "," + std::to_string(options.theta_sample.theta2) + ")";

  // Flat bands: values shared by both extreme polynomials and present, with the same
  // multiplicity, in the spectrum at every fit point and at a generic theta.
  const std::vector<double> sample = to_vector(model_eigenvalues(form.model, form.flux, options.theta_sample));
  std::vector<Band> flats;
  for (std::size_t i = 0; i < sample.size();) {
    std::size_t j = i + 1;
    while (j < sample.size() && sample[j] - sample[i] <= options.flat_tolerance) ++j;
    const int m = static_cast<int>(j - i);
    double v = 0.0;
    for (std::size_t k = i; k < j; ++k) v += sample[k];
    v /= m;
    i = j;
    const double edge_tol = options.edge_check_tolerance * (1.0 + std::abs(v));
    const int n_lo = count_near(roots_lo, v, edge_tol);
    const int n_hi = count_near(roots_hi, v, edge_tol);
    if (n_lo == 0 || n_hi == 0) continue;
    // Bands thinner than flat_tolerance count as flat, as in the grid route.
    const double presence = options.flat_tolerance * (1.0 + std::abs(v));
    const bool everywhere = std::all_of(form.spectra.begin(), form.spectra.end(), [&](const RealVector& ev) {
      int c = 0;
      for (Eigen::Index k = 0; k < ev.size(); ++k) c += std::abs(ev(k) - v) <= presence ? 1 : 0;
      return c >= m;
    });
    if (!everywhere) continue;
    if (n_lo < m || n_hi < m) throw NumericalError("flat band multiplicity exceeds edge root multiplicity");
    remove_nearest(roots_lo, v, m);
    remove_nearest(roots_hi, v, m);
    flats.push_back(Band{v, v, true, m, 0.0});
  }

  std::sort(roots_lo.begin(), roots_lo.end());
  std::sort(roots_hi.begin(), roots_hi.end());
  std::vector<Band> open;
  for (std::size_t k = 0; k < roots_lo.size(); ++k) {
    open.push_back(Band{std::min(roots_lo[k], roots_hi[k]), std::max(roots_lo[k], roots_hi[k]), false, 1, 0.0});
  }
  std::sort(open.begin(), open.end(), [](const Band& a, const Band& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });

  // Membership: inside a band t(lambda) lies in [gmin, gmax], i.e. E_lo * E_hi <= 0.
  // Sign of E_lo * E_hi, or 0 when either factor is within rounding noise.
  auto product = [&](double x) {
    const auto [lo, lo_noise] = form.combination_value_and_noise(w_lo, x);
    const auto [hi, hi_noise] = form.combination_value_and_noise(w_hi, x);
    if (std::abs(lo) <= 4.0 * lo_noise || std::abs(hi) <= 4.0 * hi_noise) return 0.0;
    return lo * hi;
  };
  for (std::size_t k = 0; k < open.size(); ++k) {
    const Band& b = open[k];
    if (b.hi - b.lo > options.touch_tolerance && product(0.5 * (b.lo + b.hi)) > 0.0)
      throw NumericalError("band interior fails the coupling-range membership test");
    if (k + 1 < open.size()) {
      // Flat bands sitting in the gap split it; each piece is tested separately.
      std::vector<double> cuts{b.hi};
      for (const Band& f : flats)
        if (f.lo > b.hi && f.lo < open[k + 1].lo) cuts.push_back(f.lo);
      std::sort(cuts.begin() + 1, cuts.end());
      cuts.push_back(open[k + 1].lo);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        // A "flat" point may stand for a band up to flat_tolerance wide, so pieces
        // next to one need clearance before their midpoint is surely in the gap.
        const bool beside_flat = c > 0 || c + 2 < cuts.size();
        const double clearance =
            beside_flat ? 4.0 * options.flat_tolerance * (1.0 + std::max(std::abs(cuts[c]), std::abs(cuts[c + 1])))
                        : options.touch_tolerance;
        if (cuts[c + 1] - cuts[c] > clearance && product(0.5 * (cuts[c] + cuts[c + 1])) < 0.0)
          throw NumericalError("gap interior fails the coupling-range membership test");
      }
    }
  }

  // Merge identical bands, snap touching edges, reject overlaps.
  std::vector<Band> merged;
  for (const Band& b : open) {
    if (!merged.empty()) {
      Band& last = merged.back();
      if (std::abs(last.lo - b.lo) <= options.touch_tolerance && std::abs(last.hi - b.hi) <= options.touch_tolerance) {
        last.multiplicity += 1;
        continue;
      }
      if (b.lo < last.hi - options.touch_tolerance) throw NumericalError("overlapping bands");
    }
    merged.push_back(b);
  }
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    if (std::abs(merged[k + 1].lo - merged[k].hi) <= options.touch_tolerance) {
      const double x = 0.5 * (merged[k + 1].lo + merged[k].hi);
      merged[k].hi = x;
      merged[k + 1].lo = x;
      bs.touching_points.push_back(x);
    }
  }
  for (const Band& f : flats) {
    for (const Band& b : merged) {
      if (f.lo >= b.lo - options.touch_tolerance && f.lo <= b.hi + options.touch_tolerance) {
        bs.touching_points.push_back(f.lo);
        break;
      }
    }
  }
  std::sort(bs.touching_points.begin(), bs.touching_points.end());

  bs.bands = merged;
  bs.bands.insert(bs.bands.end(), flats.begin(), flats.end());
  std::sort(bs.bands.begin(), bs.bands.end(), [](const Band& a, const Band& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  if (bs.total_multiplicity() != form.dim) throw NumericalError("band multiplicities do not add up to the dimension");
  return bs;
}

BandStructure bands_from_grid(const ModelSpec& model, const FluxRational& flux, int n, int threads) {
  if (n < 3) throw std::invalid_argument("grid size must be at least 3");
  const int q = flux.qi();
  const int dim = model_dimension(model.kind, q);
  const double cell = 2.0 * kPi / q;
  // The n x n lattice of the half-open cell plus a copy shifted by half a step. At odd n
  // the two sheets hold both the cell thirds and the cell midpoint, where the touching
  // edges of the worked examples sit (kagome 3/2 at 1, square 1/2 at 0).
  const double step = cell / n;
  std::vector<std::vector<RealVector>> grid(2 * static_cast<std::size_t>(n), std::vector<RealVector>(n));
  parallel_for(
      grid.size(),
      [&](std::size_t row) {
        const double offset = row < static_cast<std::size_t>(n) ? 0.0 : 0.5;
        const double i = static_cast<double>(row % n) + offset;
        for (int j = 0; j < n; ++j) grid[row][j] = model_eigenvalues(model, flux, ThetaPoint{step * i, step * (j + offset)});
      },
      threads);

  std::vector<Band> raw(dim);
  for (int k = 0; k < dim; ++k) {
    raw[k].lo = INFINITY;
    raw[k].hi = -INFINITY;
  }
  for (int sheet = 0; sheet < 2; ++sheet)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const RealVector& e = grid[sheet * n + i][j];
        const RealVector& right = grid[sheet * n + (i + 1) % n][j];
        const RealVector& up = grid[sheet * n + i][(j + 1) % n];
        for (int k = 0; k < dim; ++k) {
          raw[k].lo = std::min(raw[k].lo, e(k));
          raw[k].hi = std::max(raw[k].hi, e(k));
          raw[k].resolution = std::max({raw[k].resolution, std::abs(right(k) - e(k)), std::abs(up(k) - e(k))});
        }
      }

  BandStructure bs;
  bs.flux = flux;
  bs.model = model;
  bs.route = EdgeRoute::kGrid;
  bs.multiplicity_convention = "consecutive flat grid bands with equal value";
  for (Band b : raw) {
    b.flat = (b.hi - b.lo) < 1e-7;
    if (b.flat) {
      const double v = 0.5 * (b.lo + b.hi);
      if (!bs.bands.empty() && bs.bands.back().flat && std::abs(bs.bands.back().lo - v) < 1e-7) {
        bs.bands.back().multiplicity += 1;
        continue;
      }
      b.lo = b.hi = v;
    }
    bs.bands.push_back(b);
  }
  for (std::size_t k = 0; k + 1 < bs.bands.size(); ++k)
    if (std::abs(bs.bands[k + 1].lo - bs.bands[k].hi) < 1e-8) bs.touching_points.push_back(bs.bands[k].hi);
  return bs;
}

double monotonicity_margin(const ChambersForm& form, const CouplingStructure& structure, const Band& band,
                           int samples) {
  const Eigen::VectorXd wb = form.base_weights();
  const Eigen::VectorXd wr = form.coupling_weights(structure.reference);
  double margin = INFINITY;
  double sign = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double x = band.lo + (band.hi - band.lo) * k / (samples + 1.0);
    const auto [f, df] = form.combination_value_and_slope(wb, x);
    const auto [g, dg] = form.combination_value_and_slope(wr, x);
    const double scale = std::abs(df * g) + std::abs(f * dg);
    const double w = scale > 0.0 ? (df * g - f * dg) / scale : 0.0;
    if (sign == 0.0) sign = w >= 0.0 ? 1.0 : -1.0;
    margin = std::min(margin, sign * w);
  }
  return margin;
}

FlatBandTest flat_band_test(const FluxRational& flux, double omega) {
  FitOptions options;
  options.enforce_tolerance = false;
  const ChambersForm form = extract_chambers(ModelSpec::kagome(omega), flux, options);
  FlatBandTest out;
  out.lambda_star = -2.0 * std::cos(3.0 * omega - flux.gamma() / 8.0);
  out.residual = std::abs(form.base_value(out.lambda_star));
  out.tolerance = 1e-8 * (1.0 + form.base.sup_norm());
  out.flat = out.residual < out.tolerance;
  return out;
}

std::vector<double> flat_band_omegas(const FluxRational& flux, int samples) {
  const double period = 2.0 * kPi / 3.0;
  const ThetaPoint theta0{0.37, 1.13};
  // base_omega(lambda*) equals det(lambda* - M_K(theta, omega)) for every theta since R vanishes there.
  auto f = [&](double omega) {
    const double lambda_star = -2.0 * std::cos(3.0 * omega - flux.gamma() / 8.0);
    return charpoly_from_eigenvalues(model_eigenvalues(ModelSpec::kagome(omega), flux, theta0), lambda_star);
  };
  const double step = period / samples;
  std::vector<double> w(samples + 3);
  std::vector<double> v(samples + 3);
  double scale = 0.0;
  for (int k = 0; k < samples + 3; ++k) {
    w[k] = (k - 1) * step;
    v[k] = f(w[k]);
    scale = std::max(scale, std::abs(v[k]));
  }
  const double tol = 1e-9 * (1.0 + scale);
  const double fd = 1e-6;
  auto df = [&](double x) { return (f(x + fd) - f(x - fd)) / (2.0 * fd); };

  auto bisect = [](auto&& fn, double a, double b, double fa) {
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = fn(m);
      if (fm == 0.0) return m;
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<double> roots;
  for (int k = 1; k <= samples + 1; ++k) {
    if (v[k] == 0.0) {
      roots.push_back(w[k]);
      continue;
    }
    if (v[k + 1] != 0.0 && (v[k] < 0.0) != (v[k + 1] < 0.0)) roots.push_back(bisect(f, w[k], w[k + 1], v[k]));
    // Even-order zeros do not change sign: refine local minima of |f| on f'.
    const bool local_min = std::abs(v[k]) <= std::abs(v[k - 1]) && std::abs(v[k]) <= std::abs(v[k + 1]);
    if (local_min && std::abs(v[k]) < 1e-2 * (1.0 + scale)) {
      const double da = df(w[k - 1]);
      const double db = df(w[k + 1]);
      if (da != 0.0 && (da < 0.0) != (db < 0.0)) {
        const double x = bisect(df, w[k - 1], w[k + 1], da);
        if (std::abs(f(x)) <= tol) roots.push_back(x);
      }
    }
  }
  for (double& x : roots) {
    x = std::fmod(x, period);
    if (x < 0.0) x += period;
    if (period - x < 1e-8) x = 0.0;
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double x : roots)
    if (out.empty() || x - out.back() > 1e-8) out.push_back(x);
  if (out.size() > 1 && out.front() < 1e-8 && period - out.back() < 1e-8) out.pop_back();
  return out;
}

std::vector<Band> index_bands(const BandStructure& bs) {
  std::vector<Band> out;
  for (const Band& b : bs.bands)
    for (int k = 0; k < b.multiplicity; ++k) {
      Band one = b;
      one.multiplicity = 1;
      out.push_back(one);
    }
  std::sort(out.begin(), out.end(), [](const Band& a, const Band& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  return out;
}

OracleComparison compare_with_grid(const BandStructure& exact, const BandStructure& grid, double factor,
                                   double slack) {
  const auto e = index_bands(exact);
  const auto g = index_bands(grid);
  OracleComparison out;
  if (e.size() != g.size()) {
    out.max_edge_error = INFINITY;
    out.worst_ratio = INFINITY;
    return out;
  }
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double err = std::max(std::abs(e[k].lo - g[k].lo), std::abs(e[k].hi - g[k].hi));
    const double allowance = factor * g[k].resolution + slack;
    out.max_edge_error = std::max(out.max_edge_error, err);
    out.worst_ratio = std::max(out.worst_ratio, err / allowance);
  }
  out.pass = out.worst_ratio <= 1.0;
  return out;
}

std::vector<Gap> gap_report(const BandStructure& bs, double closed_tolerance) {
  std::vector<Gap> gaps;
  if (bs.bands.empty()) return gaps;
  std::vector<Band> sorted = bs.bands;
  std::sort(sorted.begin(), sorted.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
  double reach = sorted.front().hi;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    const Band& b = sorted[k];
    if (b.lo >= reach - closed_tolerance) {
      const double lo = std::min(reach, b.lo);
      const double hi = std::max(reach, b.lo);
      gaps.push_back(Gap{lo, hi, hi - lo < closed_tolerance});
    }
    reach = std::max(reach, b.hi);
  }
  return gaps;
}

nlohmann::json to_json(const BandStructure& bs) {
  nlohmann::json j;
  j["model"] = std::string(to_string(bs.model.kind));
  j["p"] = bs.flux.p();
  j["q"] = bs.flux.q();
  if (bs.model.kind == ModelKind::kKagome) j["omega"] = bs.model.omega;
  if (bs.model.kind == ModelKind::kTriangular) j["phi"] = bs.model.phi_for(bs.flux);
  j["method"] = std::string(to_string(bs.route));
  j["multiplicity_convention"] = bs.multiplicity_convention;
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : bs.bands) {
    nlohmann::json e = {{"lo", b.lo}, {"hi", b.hi}, {"flat", b.flat}, {"multiplicity", b.multiplicity}};
    if (bs.route == EdgeRoute::kGrid) e["resolution"] = b.resolution;
    bands.push_back(e);
  }
  j["bands"] = bands;
  j["touching_points"] = bs.touching_points;
  return j;
}

nlohmann::json to_json(const std::vector<Gap>& gaps) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& g : gaps) j.push_back({{"lo", g.lo}, {"hi", g.hi}, {"closed", g.closed}});
  return j;
}

nlohmann::json to_json(const CouplingRange& range) {
  nlohmann::json ratios = nlohmann::json::object();
  for (std::size_t k = 0; k < kAllPatterns.size(); ++k)
    ratios[std::string(pattern_name(kAllPatterns[k]))] = range.structure.ratios[k];
  return {{"gmin", range.gmin},
          {"gmax", range.gmax},
          {"reference", std::string(pattern_name(range.structure.reference))},
          {"ratios", ratios},
          {"closed_form", range.closed_form},
          {"misfit", range.structure.misfit}};
}

}  // namespace butterfly_lab
