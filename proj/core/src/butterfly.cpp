#include "butterfly_lab/butterfly.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/parallel.hpp"

namespace butterfly_lab {

std::string_view to_string(ButterflyMethod method) {
  return method == ButterflyMethod::kChambers ? "chambers" : "grid";
}

std::optional<ButterflyMethod> parse_butterfly_method(std::string_view name) {
  if (name == "chambers") return ButterflyMethod::kChambers;
  if (name == "grid") return ButterflyMethod::kGrid;
  return std::nullopt;
}

std::vector<FluxRational> enumerate_fluxes(int qmax) {
  if (qmax < 1) throw std::invalid_argument("enumerate_fluxes: qmax must be >= 1");
  std::vector<FluxRational> out;
  out.emplace_back(0, 1);
  out.emplace_back(1, 1);
  for (long q = 2; q <= qmax; ++q)
    for (long p = 1; p < q; ++p)
      if (std::gcd(p, q) == 1) out.emplace_back(p, q);
  return out;
}

namespace {

int default_grid(int dim) { return std::clamp(400 / dim, 5, 201); }

}  // namespace

BandStructure compute_bands(const ModelSpec& model, const FluxRational& flux, const ButterflyOptions& options,
                            FluxOutcome* outcome) {
  FluxOutcome local;
  FluxOutcome& out = outcome ? *outcome : local;
  out = FluxOutcome{flux, EdgeRoute::kGrid, {}};
  const int dim = model_dimension(model.kind, flux.qi());
  const int n = options.grid_n > 0 ? options.grid_n : default_grid(dim);

  if (options.method == ButterflyMethod::kChambers) {
    try {
      FitOptions fit;
      fit.theta_grid = options.theta_grid;
      fit.tolerance = options.fit_tolerance;
      // Per-flux cost is dominated by eigensolves and validation; the extremal route
      // covers edges outside the sampled window anyway.
      fit.extremal_candidates = false;
      fit.validation_samples = 4;
      const ChambersForm form = extract_chambers(model, flux, fit);
      const CouplingRange range = coupling_range(form);
      for (EdgeRoute route : {EdgeRoute::kCompanion, EdgeRoute::kExtremal}) {
        if (route == EdgeRoute::kCompanion && dim > options.companion_max_dim) continue;
        BandOptions bo = options.band_options;
        bo.route = route;
        try {
          BandStructure bs = bands_from_chambers(form, range, bo);
          out.route = route;
          return bs;
        } catch (const NumericalError& e) {
          out.fallbacks.push_back(std::string(to_string(route)) + ": " + e.what());
        }
      }
    } catch (const NumericalError& e) {
      out.fallbacks.push_back(std::string("chambers: ") + e.what());
    }
  }
  // Per-flux work already runs in parallel, so the oracle stays single-threaded here.
  BandStructure bs = bands_from_grid(model, flux, n, 1);
  out.route = EdgeRoute::kGrid;
  return bs;
}

std::vector<ButterflyRecord> records_for(const BandStructure& bs) {
  std::vector<ButterflyRecord> out;
  int index = 0;
  for (const Band& b : bs.bands) {
    out.push_back(ButterflyRecord{bs.flux.p(), bs.flux.q(), bs.flux.fraction(), index++, b.lo, b.hi, b.flat,
                                  b.multiplicity});
  }
  return out;
}

ButterflyDataset generate_butterfly(const ModelSpec& model, int qmax, const ButterflyOptions& options) {
  const auto fluxes = enumerate_fluxes(qmax);
  std::vector<BandStructure> results(fluxes.size());
  std::vector<FluxOutcome> outcomes(fluxes.size());
  parallel_for(
      fluxes.size(),
      [&](std::size_t i) { results[i] = compute_bands(model, fluxes[i], options, &outcomes[i]); },
      options.threads);

  ButterflyDataset ds;
  ds.model = model;
  ds.qmax = qmax;
  ds.method = options.method;
  ds.outcomes = std::move(outcomes);
  for (const auto& bs : results) {
    const auto r = records_for(bs);
    ds.records.insert(ds.records.end(), r.begin(), r.end());
  }
  return ds;
}

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

}  // namespace

std::string to_csv(const ButterflyDataset& ds) {
  std::string s = "p,q,flux,band_index,lambda_min,lambda_max,flat,multiplicity\n";
  for (const auto& r : ds.records) {
    s += std::to_string(r.p) + "," + std::to_string(r.q) + "," + fmt12(r.flux_fraction) + "," +
         std::to_string(r.band_index) + "," + fmt12(r.lo) + "," + fmt12(r.hi) + "," + (r.flat ? "1" : "0") + "," +
         std::to_string(r.multiplicity) + "\n";
  }
  return s;
}

nlohmann::json to_json(const ButterflyDataset& ds) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : ds.records) {
    records.push_back({{"p", r.p},
                       {"q", r.q},
                       {"flux", r.flux_fraction},
                       {"band_index", r.band_index},
                       {"lambda_min", r.lo},
                       {"lambda_max", r.hi},
                       {"flat", r.flat},
                       {"multiplicity", r.multiplicity}});
  }
  nlohmann::json routes = nlohmann::json::array();
  for (const auto& o : ds.outcomes) {
    nlohmann::json e = {{"p", o.flux.p()}, {"q", o.flux.q()}, {"route", to_string(o.route)}};
    if (!o.fallbacks.empty()) e["fallbacks"] = o.fallbacks;
    routes.push_back(e);
  }
  nlohmann::json model = {{"kind", to_string(ds.model.kind)}};
  if (ds.model.kind == ModelKind::kKagome) model["omega"] = ds.model.omega;
  if (ds.model.kind == ModelKind::kTriangular && ds.model.phi) model["phi"] = *ds.model.phi;
  if (ds.model.kind == ModelKind::kSquare) model["harper_half_normalization"] = ds.model.harper_half_normalization;
  return {{"model", model}, {"qmax", ds.qmax}, {"method", to_string(ds.method)}, {"records", records},
          {"routes", routes}};
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_csv(const ButterflyDataset& ds, const std::filesystem::path& path) { write_text(to_csv(ds), path); }

void write_json(const ButterflyDataset& ds, const std::filesystem::path& path) {
  write_text(to_json(ds).dump(2) + "\n", path);
}

}  // namespace butterfly_lab
