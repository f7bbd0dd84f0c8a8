#pragma once

#include <optional>
#include <string>

#include "butterfly_lab/butterfly.hpp"

namespace butterfly_lab {

struct SvgOptions {
  // Horizontal frame; defaults to [-b, b] with b = spectral_bound(model).
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  // Defaults to max(0.3, height / (2 qmax^2)).
  std::optional<double> stroke_width;
  double margin_left = 56.0;
  double margin_right = 16.0;
  double margin_top = 16.0;
  double margin_bottom = 44.0;
  std::string title;
};

// Standalone SVG: one horizontal segment per record at height p/q, flat bands as dots,
// axes labelled lambda and gamma/2pi. Coordinates use a fixed 4-decimal format.
std::string render_svg(const ButterflyDataset& ds, double width, double height, const SvgOptions& options = {});

}  // namespace butterfly_lab
