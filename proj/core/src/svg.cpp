#include "butterfly_lab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace butterfly_lab {

namespace {

std::string f4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const ButterflyDataset& ds, double width, double height, const SvgOptions& options) {
  if (!(width >= 0.0) || !(height >= 0.0)) throw std::invalid_argument("render_svg: negative dimensions");
  const double bound = spectral_bound(ds.model);
  const double lmin = options.lambda_min.value_or(-bound);
  const double lmax = options.lambda_max.value_or(bound);
  if (!(lmax > lmin)) throw std::invalid_argument("render_svg: empty lambda range");
  const double qmax = std::max(1, ds.qmax);
  const double stroke = options.stroke_width.value_or(std::max(0.3, height / (2.0 * qmax * qmax)));

  const double x0 = options.margin_left;
  const double x1 = std::max(x0, width - options.margin_right);
  const double y0 = options.margin_top;
  const double y1 = std::max(y0, height - options.margin_bottom);
  auto px = [&](double lambda) { return x0 + (lambda - lmin) / (lmax - lmin) * (x1 - x0); };
  auto py = [&](double frac) { return y1 - frac * (y1 - y0); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f4(width) + "\" height=\"" + f4(height) +
       "\" viewBox=\"0 0 " + f4(width) + " " + f4(height) + "\">\n";
  if (!options.title.empty()) s += "<title>" + escape(options.title) + "</title>\n";
  s += "<rect x=\"0.0000\" y=\"0.0000\" width=\"" + f4(width) + "\" height=\"" + f4(height) + "\" fill=\"white\"/>\n";

  // Axes and frame.
  s += "<g stroke=\"black\" stroke-width=\"0.8000\" fill=\"none\">\n";
  s += "<rect x=\"" + f4(x0) + "\" y=\"" + f4(y0) + "\" width=\"" + f4(x1 - x0) + "\" height=\"" + f4(y1 - y0) +
       "\"/>\n";
  for (double t : {lmin, 0.5 * (lmin + lmax), lmax})
    s += "<line x1=\"" + f4(px(t)) + "\" y1=\"" + f4(y1) + "\" x2=\"" + f4(px(t)) + "\" y2=\"" + f4(y1 + 4.0) + "\"/>\n";
  for (double t : {0.0, 0.5, 1.0})
    s += "<line x1=\"" + f4(x0 - 4.0) + "\" y1=\"" + f4(py(t)) + "\" x2=\"" + f4(x0) + "\" y2=\"" + f4(py(t)) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (double t : {lmin, 0.5 * (lmin + lmax), lmax}) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t == 0.0 ? 0.0 : t);
    s += "<text x=\"" + f4(px(t)) + "\" y=\"" + f4(y1 + 16.0) + "\" text-anchor=\"middle\">" + buf + "</text>\n";
  }
  for (double t : {0.0, 0.5, 1.0}) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    s += "<text x=\"" + f4(x0 - 7.0) + "\" y=\"" + f4(py(t) + 4.0) + "\" text-anchor=\"end\">" + buf + "</text>\n";
  }
  s += "<text x=\"" + f4(0.5 * (x0 + x1)) + "\" y=\"" + f4(y1 + 34.0) + "\" text-anchor=\"middle\">\xce\xbb</text>\n";
  s += "<text x=\"" + f4(14.0) + "\" y=\"" + f4(0.5 * (y0 + y1)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 " +
       f4(14.0) + " " + f4(0.5 * (y0 + y1)) + ")\">\xce\xb3/2\xcf\x80</text>\n";
  s += "</g>\n";

  s += "<g stroke=\"black\" stroke-width=\"" + f4(stroke) + "\" fill=\"black\">\n";
  for (const auto& r : ds.records) {
    const double y = py(r.flux_fraction);
    if (r.flat) {
      s += "<circle cx=\"" + f4(px(r.lo)) + "\" cy=\"" + f4(y) + "\" r=\"" + f4(stroke) + "\" stroke=\"none\"/>\n";
    } else {
      s += "<line x1=\"" + f4(px(r.lo)) + "\" y1=\"" + f4(y) + "\" x2=\"" + f4(px(r.hi)) + "\" y2=\"" + f4(y) + "\"/>\n";
    }
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace butterfly_lab
