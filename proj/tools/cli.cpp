#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "butterfly_lab/bands.hpp"
#include "butterfly_lab/butterfly.hpp"
#include "butterfly_lab/chambers.hpp"
#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/semiclassical.hpp"
#include "butterfly_lab/svg.hpp"
#include "butterfly_lab/verify.hpp"

namespace butterfly_lab::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kMaxQ = 512;
constexpr double kSignFloor = 1e-8;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tolerances and knobs shared by the commands. Defaults, then --config file, then flags.
struct Settings {
  std::uint64_t seed = 42;
  double fit_tolerance = 1e-8;
  double edge_check_tolerance = 1e-6;
  double flat_tolerance = 1e-7;
  double touch_tolerance = 1e-8;
  int grid = 0;        // 0: command default
  int theta_grid = 0;  // 0: command default
  int threads = 0;
};

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) throw UsageError("config: bad value for " + key + ": '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") s.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "fit_tolerance") s.fit_tolerance = parse_value<double>(key, value);
    else if (key == "edge_check_tolerance") s.edge_check_tolerance = parse_value<double>(key, value);
    else if (key == "flat_tolerance") s.flat_tolerance = parse_value<double>(key, value);
    else if (key == "touch_tolerance") s.touch_tolerance = parse_value<double>(key, value);
    else if (key == "grid") s.grid = parse_value<int>(key, value);
    else if (key == "theta_grid") s.theta_grid = parse_value<int>(key, value);
    else if (key == "threads") s.threads = parse_value<int>(key, value);
    else throw UsageError(path + ":" + std::to_string(number) + ": unknown key '" + key + "'");
  }
}

// Flag-side overrides; unset flags leave the file/default value alone.
struct SettingFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> fit_tolerance;
  std::optional<double> edge_check_tolerance;
  std::optional<double> flat_tolerance;
  std::optional<double> touch_tolerance;
  std::optional<int> grid;
  std::optional<int> theta_grid;
  std::optional<int> threads;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "key=value file overriding tolerances (flags win)");
    app->add_option("--seed", seed, "Random seed (default 42)");
    app->add_option("--fit-tolerance", fit_tolerance, "Chambers fit residual bound (default 1e-8)");
    app->add_option("--edge-check-tolerance", edge_check_tolerance, "Companion edge cross-check (default 1e-6)");
    app->add_option("--flat-tolerance", flat_tolerance, "Flat-band clustering window (default 1e-7)");
    app->add_option("--touch-tolerance", touch_tolerance, "Touching-edge window (default 1e-8)");
    app->add_option("--grid", grid, "Theta grid side for the grid oracle");
    app->add_option("--theta-grid", theta_grid, "Theta grid side for the Chambers fit");
    app->add_option("--threads", threads, "Worker threads (0: BUTTERFLY_LAB_THREADS or hardware)");
  }

  Settings resolve() const {
    Settings s;
    if (!config.empty()) apply_config_file(config, s);
    if (seed) s.seed = *seed;
    if (fit_tolerance) s.fit_tolerance = *fit_tolerance;
    if (edge_check_tolerance) s.edge_check_tolerance = *edge_check_tolerance;
    if (flat_tolerance) s.flat_tolerance = *flat_tolerance;
    if (touch_tolerance) s.touch_tolerance = *touch_tolerance;
    if (grid) s.grid = *grid;
    if (theta_grid) s.theta_grid = *theta_grid;
    if (threads) s.threads = *threads;
    if (!(s.fit_tolerance > 0.0) || !(s.edge_check_tolerance > 0.0) || !(s.flat_tolerance > 0.0) ||
        !(s.touch_tolerance >= 0.0))
      throw UsageError("tolerances must be positive");
    if (s.grid < 0 || s.theta_grid < 0 || s.threads < 0) throw UsageError("grid sizes and threads must be >= 0");
    if (s.theta_grid != 0 && s.theta_grid < 3) throw UsageError("--theta-grid must be at least 3");
    return s;
  }
};

BandOptions band_options(const Settings& s) {
  BandOptions bo;
  bo.edge_check_tolerance = s.edge_check_tolerance;
  bo.flat_tolerance = s.flat_tolerance;
  bo.touch_tolerance = s.touch_tolerance;
  return bo;
}

// "k/n" -> pi * k / n.
double parse_pi_fraction(const std::string& text) {
  const auto slash = text.find('/');
  const std::string num = slash == std::string::npos ? text : text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  try {
    std::size_t a = 0;
    std::size_t b = 0;
    const long k = std::stol(num, &a);
    const long n = std::stol(den, &b);
    if (a != num.size() || b != den.size() || n == 0) throw std::invalid_argument(text);
    return kPi * static_cast<double>(k) / static_cast<double>(n);
  } catch (const std::exception&) {
    throw UsageError("--omega-pi expects k/n with integers k, n != 0, got '" + text + "'");
  }
}

struct ModelArgs {
  std::string model = "square";
  std::optional<double> omega;
  std::string omega_pi;
  std::optional<double> phi;

  void add_to(CLI::App* app, bool with_model = true) {
    if (with_model)
      app->add_option("--model", model, "square | triangular | hexagonal (graphene) | kagome")->capture_default_str();
    auto* o = app->add_option("--omega", omega, "Kagome phase omega in radians (default 0)");
    auto* op = app->add_option("--omega-pi", omega_pi, "Kagome phase as a fraction of pi, k/n");
    o->excludes(op);
    op->excludes(o);
    if (with_model) app->add_option("--phi", phi, "Triangular phase in radians (default -gamma/2)");
  }

  std::optional<double> omega_value() const {
    if (!omega_pi.empty()) return parse_pi_fraction(omega_pi);
    return omega;
  }

  ModelSpec spec() const {
    const auto kind = parse_model_kind(model);
    if (!kind) throw UsageError("unknown model '" + model + "'");
    const auto w = omega_value();
    if (w && *kind != ModelKind::kKagome) throw UsageError("--omega applies to the kagome model only");
    if (phi && *kind != ModelKind::kTriangular) throw UsageError("--phi applies to the triangular model only");
    if (w && !std::isfinite(*w)) throw UsageError("--omega must be finite");
    if (phi && !std::isfinite(*phi)) throw UsageError("--phi must be finite");
    switch (*kind) {
      case ModelKind::kSquare: return ModelSpec::square();
      case ModelKind::kTriangular: return ModelSpec::triangular(phi);
      case ModelKind::kHexagonal: return ModelSpec::hexagonal();
      case ModelKind::kKagome: return ModelSpec::kagome(w.value_or(0.0));
    }
    throw UsageError("unknown model");
  }
};

struct FluxArgs {
  long p = 0;
  long q = 1;

  void add_to(CLI::App* app) {
    app->add_option("--p", p, "Flux numerator")->required();
    app->add_option("--q", q, "Flux denominator")->required();
  }

  FluxRational flux() const {
    if (q < 1 || q > kMaxQ) throw UsageError("--q must be in [1, " + std::to_string(kMaxQ) + "]");
    if (std::gcd(p < 0 ? -p : p, q) != 1) throw UsageError("p/q must be a reduced fraction");
    return FluxRational(p, q);
  }
};

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string describe(const ModelSpec& model, const FluxRational& flux) {
  std::string s = std::string(to_string(model.kind)) + " p/q=" + flux.str();
  if (model.kind == ModelKind::kKagome) s += " omega=" + g12(model.omega);
  if (model.kind == ModelKind::kTriangular) s += " phi=" + g12(model.phi_for(flux));
  return s;
}

// ---- bands ----

struct BandsCommand {
  ModelArgs model;
  FluxArgs flux;
  SettingFlags settings;
  std::string method = "chambers";
  bool json = false;
  bool table = false;

  void add_to(CLI::App* app) {
    model.add_to(app);
    flux.add_to(app);
    settings.add_to(app);
    app->add_option("--method", method, "chambers | grid")->capture_default_str();
    auto* j = app->add_flag("--json", json, "Print JSON");
    auto* t = app->add_flag("--table", table, "Print a table (default)");
    j->excludes(t);
    t->excludes(j);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const ModelSpec spec = model.spec();
    const FluxRational f = flux.flux();
    const Settings s = settings.resolve();
    const auto m = parse_butterfly_method(method);
    if (!m) throw UsageError("unknown method '" + method + "'");

    BandStructure bs;
    std::vector<std::string> fallbacks;
    nlohmann::json range_json;
    if (*m == ButterflyMethod::kGrid) {
      bs = bands_from_grid(spec, f, s.grid > 0 ? s.grid : 201, s.threads);
    } else {
      FitOptions fit;
      fit.seed = s.seed;
      fit.tolerance = s.fit_tolerance;
      if (s.theta_grid > 0) fit.theta_grid = s.theta_grid;
      const ChambersForm form = extract_chambers(spec, f, fit);
      const CouplingRange range = coupling_range(form);
      range_json = to_json(range);
      bool done = false;
      for (EdgeRoute route : {EdgeRoute::kCompanion, EdgeRoute::kExtremal}) {
        BandOptions bo = band_options(s);
        bo.route = route;
        try {
          bs = bands_from_chambers(form, range, bo);
          done = true;
          break;
        } catch (const NumericalError& e) {
          fallbacks.push_back(std::string(to_string(route)) + ": " + e.what());
        }
      }
      if (!done) {
        for (const auto& why : fallbacks) err << "fallback " << why << "\n";
        throw NumericalError("every Chambers edge route failed; rerun with --method grid");
      }
    }
    const auto gaps = gap_report(bs, s.touch_tolerance);

    if (json) {
      nlohmann::json j = to_json(bs);
      j["gaps"] = to_json(gaps);
      j["fallbacks"] = fallbacks;
      if (!range_json.is_null()) j["coupling_range"] = range_json;
      out << j.dump(2) << "\n";
      return kOk;
    }
    out << describe(spec, f) << " route=" << to_string(bs.route) << "\n";
    for (const auto& why : fallbacks) out << "# fallback " << why << "\n";
    out << "index lambda_min lambda_max flat multiplicity\n";
    int index = 0;
    for (const Band& b : bs.bands)
      out << index++ << " " << g12(b.lo) << " " << g12(b.hi) << " " << (b.flat ? 1 : 0) << " " << b.multiplicity
          << "\n";
    out << "gaps\n";
    for (const Gap& g : gaps) out << g12(g.lo) << " " << g12(g.hi) << " " << (g.closed ? "closed" : "open") << "\n";
    for (double t : bs.touching_points) out << "touching " << g12(t) << "\n";
    return kOk;
  }
};

// ---- chambers ----

struct ChambersCommand {
  ModelArgs model;
  FluxArgs flux;
  SettingFlags settings;

  void add_to(CLI::App* app) {
    model.add_to(app);
    flux.add_to(app);
    settings.add_to(app);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const ModelSpec spec = model.spec();
    const FluxRational f = flux.flux();
    const Settings s = settings.resolve();
    FitOptions fit;
    fit.seed = s.seed;
    fit.tolerance = s.fit_tolerance;
    fit.enforce_tolerance = false;
    if (s.theta_grid > 0) fit.theta_grid = s.theta_grid;
    const ChambersForm form = extract_chambers(spec, f, fit);

    nlohmann::json j = to_json(form);
    // Empirical signs: each coupling against the common reference polynomial.
    try {
      const CouplingStructure cs = coupling_structure(form);
      nlohmann::json signs = nlohmann::json::object();
      nlohmann::json ratios = nlohmann::json::object();
      for (std::size_t k = 0; k < kAllPatterns.size(); ++k) {
        const std::string name(pattern_name(kAllPatterns[k]));
        ratios[name] = cs.ratios[k];
        // Ratios below the fit noise carry no sign.
        const double r = std::abs(cs.ratios[k]) < kSignFloor ? 0.0 : cs.ratios[k];
        signs[name] = r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
      }
      j["coupling_structure"] = {{"reference", std::string(pattern_name(cs.reference))},
                                 {"ratios", ratios},
                                 {"signs", signs},
                                 {"misfit", cs.misfit}};
    } catch (const NumericalError& e) {
      j["coupling_structure"] = {{"error", e.what()}};
    }
    if (spec.kind == ModelKind::kTriangular) {
      // The second gap of the worked example closes at -sqrt 3. Reported for the bare base
      // and for the extreme-coupling edge polynomial base + gmax R.
      const double x = -std::sqrt(3.0);
      const auto [bv, bs] = form.combination_value_and_slope(form.base_weights(), x);
      nlohmann::json t = {{"lambda", x}, {"base_value", bv}, {"base_slope", bs}};
      try {
        const CouplingRange range = coupling_range(form);
        const auto [ev, es] = form.combination_value_and_slope(
            form.base_weights() + range.gmax * form.coupling_weights(range.structure.reference), x);
        t["gmax"] = range.gmax;
        t["edge_value"] = ev;
        t["edge_slope"] = es;
      } catch (const NumericalError& e) {
        t["error"] = e.what();
      }
      j["touching_check"] = t;
    }
    if (spec.kind == ModelKind::kKagome) {
      const IdentityReport theorem = verify_kagome_theorem(f, spec.omega, 16, s.seed, s.fit_tolerance);
      j["kagome_structure"] = to_json(theorem);
    }
    out << j.dump(2) << "\n";
    if (!(form.fit_residual <= s.fit_tolerance)) {
      err << "fit residual " << form.fit_residual << " exceeds tolerance " << s.fit_tolerance << "\n";
      return kFailure;
    }
    return kOk;
  }
};

// ---- flatband ----

struct FlatbandCommand {
  ModelArgs model;
  FluxArgs flux;
  bool scan = false;
  int samples = 4096;

  void add_to(CLI::App* app) {
    model.add_to(app, false);
    flux.add_to(app);
    auto* s = app->add_flag("--scan", scan, "Scan omega over [0, 2 pi/3)");
    app->add_option("--samples", samples, "Scan resolution")->capture_default_str();
    s->excludes("--omega");
    s->excludes("--omega-pi");
  }

  int run(std::ostream& out) const {
    const FluxRational f = flux.flux();
    const auto omega = model.omega_value();
    if (!scan && !omega) throw UsageError("flatband needs --omega, --omega-pi or --scan");
    if (omega && !std::isfinite(*omega)) throw UsageError("--omega must be finite");
    nlohmann::json j = {{"p", f.p()}, {"q", f.q()}};
    if (scan) {
      if (samples < 16) throw UsageError("--samples must be at least 16");
      const auto omegas = flat_band_omegas(f, samples);
      nlohmann::json list = nlohmann::json::array();
      for (double w : omegas) list.push_back({{"omega", w}, {"omega_over_pi", w / kPi}});
      j["scan"] = list;
    } else {
      const FlatBandTest t = flat_band_test(f, *omega);
      j["omega"] = *omega;
      j["flat"] = t.flat;
      j["lambda_star"] = t.lambda_star;
      j["residual"] = t.residual;
      j["tolerance"] = t.tolerance;
    }
    out << j.dump(2) << "\n";
    return kOk;
  }
};

// ---- butterfly ----

struct ButterflyCommand {
  ModelArgs model;
  SettingFlags settings;
  int qmax = 20;
  std::string out_path;
  std::string svg_path;
  bool csv = false;
  bool json = false;
  std::string method = "chambers";
  double width = 800.0;
  double height = 800.0;

  void add_to(CLI::App* app) {
    model.add_to(app);
    settings.add_to(app);
    app->add_option("--qmax", qmax, "Largest denominator")->capture_default_str();
    app->add_option("--out", out_path, "Dataset path (CSV unless --json or a .json name)")->required();
    app->add_option("--svg", svg_path, "Optional SVG path");
    auto* c = app->add_flag("--csv", csv, "Write CSV");
    auto* j = app->add_flag("--json", json, "Write JSON");
    c->excludes(j);
    j->excludes(c);
    app->add_option("--method", method, "chambers | grid")->capture_default_str();
    app->add_option("--width", width, "SVG width")->capture_default_str();
    app->add_option("--height", height, "SVG height")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const ModelSpec spec = model.spec();
    const Settings s = settings.resolve();
    if (qmax < 1 || qmax > kMaxQ) throw UsageError("--qmax must be in [1, " + std::to_string(kMaxQ) + "]");
    if (!(width > 0.0) || !(height > 0.0)) throw UsageError("--width and --height must be positive");
    const auto m = parse_butterfly_method(method);
    if (!m) throw UsageError("unknown method '" + method + "'");

    ButterflyOptions bo;
    bo.method = *m;
    bo.threads = s.threads;
    bo.grid_n = s.grid;
    bo.fit_tolerance = s.fit_tolerance;
    if (s.theta_grid > 0) bo.theta_grid = s.theta_grid;
    bo.band_options = band_options(s);
    const ButterflyDataset ds = generate_butterfly(spec, qmax, bo);

    const bool as_json = json || (!csv && out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json");
    if (as_json) write_json(ds, out_path);
    else write_csv(ds, out_path);
    if (!svg_path.empty()) write_text(render_svg(ds, width, height), svg_path);

    int grid_fluxes = 0;
    for (const auto& o : ds.outcomes) grid_fluxes += o.route == EdgeRoute::kGrid ? 1 : 0;
    out << "model " << to_string(spec.kind) << " qmax " << qmax << " fluxes " << ds.outcomes.size() << " records "
        << ds.records.size() << " grid_fallbacks " << grid_fluxes << "\n";
    out << "wrote " << out_path << (as_json ? " (json)" : " (csv)") << "\n";
    if (!svg_path.empty()) out << "wrote " << svg_path << "\n";
    return kOk;
  }
};

// ---- verify ----

struct VerifyCommand {
  SettingFlags settings;
  int samples = 16;
  int qmax = 8;
  bool json = false;
  std::string inject;

  void add_to(CLI::App* app) {
    settings.add_to(app);
    app->add_option("--samples", samples, "Random samples per check")->capture_default_str();
    app->add_option("--qmax", qmax, "Largest q for the symmetry suite")->capture_default_str();
    app->add_flag("--json", json, "Print the full report as JSON");
    // Negative control for tests: adds 1 to the named check's residual.
    app->add_option("--inject-fault", inject)->group("");
  }

  int run(std::ostream& out) const {
    const Settings s = settings.resolve();
    if (samples < 1) throw UsageError("--samples must be positive");
    if (qmax < 1 || qmax > 32) throw UsageError("--qmax must be in [1, 32]");
    VerifyOptions vo;
    vo.seed = s.seed;
    vo.samples = samples;
    vo.qmax = qmax;
    if (!inject.empty()) vo.fault = FaultInjection{inject, 1.0};
    const IdentityReport rep = run_verification(vo);
    if (json) {
      out << to_json(rep).dump(2) << "\n";
    } else {
      out << "checks " << rep.checks().size() << " failed " << rep.failed_checks().size() << " seed " << s.seed
          << "\n";
      for (const auto& name : rep.failed_checks()) {
        const auto& c = rep.checks().at(name);
        out << "FAIL " << name << " residual " << g12(c.residual) << " tolerance " << g12(c.tolerance) << "\n";
      }
      out << (rep.pass() ? "PASS" : "FAIL") << "\n";
    }
    return rep.pass() ? kOk : kFailure;
  }
};

// ---- semiclassical ----

struct SemiclassicalCommand {
  int grid = 64;
  double h = 0.01;

  void add_to(CLI::App* app) {
    app->set_help_flag("--help", "Print this help message and exit");  // frees the name h for --h
    app->add_option("--grid", grid, "Torus grid side (>= 8)")->capture_default_str();
    app->add_option("--h", h, "Flux offset h, gamma = 4 pi + h (0 < |h| <= 0.2)")->capture_default_str();
  }

  int run(std::ostream& out, std::ostream& err) const {
    if (grid < 8 || grid > 1024) throw UsageError("--grid must be in [8, 1024]");
    if (!(std::abs(h) > 0.0) || !(std::abs(h) <= 0.2)) throw UsageError("--h must satisfy 0 < |h| <= 0.2");
    const SubprincipalReport rep = subprincipal_report(grid);
    const BandHull hull = effective_band_hull(h, grid);

    // First-order hull is [-3h/4, 0] (reflected for h < 0); the remainder is O(h^2).
    const double pred_lo = h > 0.0 ? -0.75 * h : 0.0;
    const double pred_hi = h > 0.0 ? 0.0 : -0.75 * h;
    IdentityReport checks;
    checks.record("derivative_formula", rep.max_derivative_error, 1e-6);
    checks.record("kernel_correction", rep.max_correction_error, 1e-5);
    checks.record("min_subprincipal", std::abs(rep.min_subprincipal + 0.75), 1e-6);
    checks.record("max_subprincipal", std::abs(rep.max_subprincipal), 1e-6);
    checks.record("hull", std::max(std::abs(hull.lo - pred_lo), std::abs(hull.hi - pred_hi)), h * h);

    nlohmann::json j = {{"subprincipal", to_json(rep)}, {"hull", to_json(hull)}, {"checks", to_json(checks)}};
    out << j.dump(2) << "\n";
    for (const auto& name : checks.failed_checks()) err << "FAIL " << name << "\n";
    return checks.pass() ? kOk : kFailure;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rational-flux magnetic lattice spectra: Chambers forms, bands, butterflies, checks",
               "butterfly-lab"};
  app.require_subcommand(1);
  app.fallthrough(false);

  BandsCommand bands;
  ChambersCommand chambers;
  FlatbandCommand flatband;
  ButterflyCommand butterfly;
  VerifyCommand verify;
  SemiclassicalCommand semiclassical;
  auto* c_bands = app.add_subcommand("bands", "Band structure of one flux");
  auto* c_chambers = app.add_subcommand("chambers", "Chambers decomposition of det(lambda - M(theta))");
  auto* c_flat = app.add_subcommand("flatband", "Kagome flat-band test or omega scan");
  auto* c_bfly = app.add_subcommand("butterfly", "Butterfly dataset (CSV/JSON) and optional SVG");
  auto* c_verify = app.add_subcommand("verify", "Run every identity and property check");
  auto* c_semi = app.add_subcommand("semiclassical", "Subprincipal symbol and effective band hull");
  bands.add_to(c_bands);
  chambers.add_to(c_chambers);
  flatband.add_to(c_flat);
  butterfly.add_to(c_bfly);
  verify.add_to(c_verify);
  semiclassical.add_to(c_semi);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();  // forwards to the selected subcommand
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (c_bands->parsed()) return bands.run(out, err);
    if (c_chambers->parsed()) return chambers.run(out, err);
    if (c_flat->parsed()) return flatband.run(out);
    if (c_bfly->parsed()) return butterfly.run(out);
    if (c_verify->parsed()) return verify.run(out);
    if (c_semi->parsed()) return semiclassical.run(out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace butterfly_lab::cli
