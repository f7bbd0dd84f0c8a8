#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "butterfly_lab/bands.hpp"
#include "butterfly_lab/flux.hpp"

namespace butterfly_lab {

struct ButterflyRecord {
  long p = 0;
  long q = 1;
  double flux_fraction = 0.0;
  int band_index = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool flat = false;
  int multiplicity = 1;
};

enum class ButterflyMethod { kChambers, kGrid };
std::string_view to_string(ButterflyMethod method);
std::optional<ButterflyMethod> parse_butterfly_method(std::string_view name);

// Which route produced a flux's bands, and why earlier routes were abandoned.
struct FluxOutcome {
  FluxRational flux{0, 1};
  EdgeRoute route = EdgeRoute::kCompanion;
  std::vector<std::string> fallbacks;
};

struct ButterflyDataset {
  ModelSpec model;
  int qmax = 1;
  ButterflyMethod method = ButterflyMethod::kChambers;
  // Sorted by (q, p, band_index).
  std::vector<ButterflyRecord> records;
  // One per flux, in enumeration order.
  std::vector<FluxOutcome> outcomes;
};

struct ButterflyOptions {
  ButterflyMethod method = ButterflyMethod::kChambers;
  // Chambers fit grid side; 3 keeps large-q fits cheap and still separates all patterns.
  int theta_grid = 3;
  double fit_tolerance = 1e-8;
  // Grid method / fallback side; 0 picks max(5, min(201, 400 / dim)).
  int grid_n = 0;
  int threads = 0;
  // Companion roots rarely come out certifiably real past this dimension; larger
  // fluxes go straight to extremal edges.
  int companion_max_dim = 64;
  BandOptions band_options;
};

// Reduced p/q in [0, 1] with q <= qmax, sorted by (q, p).
std::vector<FluxRational> enumerate_fluxes(int qmax);

// Bands of one flux: companion edges, then extremal-theta edges, then the grid oracle.
BandStructure compute_bands(const ModelSpec& model, const FluxRational& flux, const ButterflyOptions& options,
                            FluxOutcome* outcome = nullptr);

ButterflyDataset generate_butterfly(const ModelSpec& model, int qmax, const ButterflyOptions& options = {});

std::vector<ButterflyRecord> records_for(const BandStructure& bs);

std::string to_csv(const ButterflyDataset& ds);
nlohmann::json to_json(const ButterflyDataset& ds);
// Throw std::runtime_error naming the path on I/O failure.
void write_csv(const ButterflyDataset& ds, const std::filesystem::path& path);
void write_json(const ButterflyDataset& ds, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace butterfly_lab
