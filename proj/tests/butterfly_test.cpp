#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "butterfly_lab/butterfly.hpp"
#include "butterfly_lab/svg.hpp"
#include "oracles.hpp"

using namespace butterfly_lab;
using oracle::kPi;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "butterfly_lab_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

// Start/end tags balance and nest (self-closing tags and the XML declaration aside).
bool well_formed(const std::string& s) {
  std::vector<std::string> stack;
  for (std::size_t pos = s.find('<'); pos != std::string::npos; pos = s.find('<', pos + 1)) {
    const std::size_t end = s.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = s.substr(pos + 1, end - pos - 1);
    if (tag.empty() || tag[0] == '?') continue;
    if (tag.back() == '/') continue;
    const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \n") - (tag[0] == '/' ? 1 : 0));
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::vector<std::pair<double, double>> band_multiset(const ButterflyDataset& ds, long p, long q) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : ds.records)
    if (r.p == p && r.q == q)
      for (int k = 0; k < r.multiplicity; ++k) out.emplace_back(r.lo, r.hi);
  // By midpoint: equal lower edges can differ in the last bit between routes.
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first + a.second < b.first + b.second; });
  return out;
}

}  // namespace

TEST(EnumerateFluxes, Examples) {
  const auto one = enumerate_fluxes(1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0], FluxRational(0, 1));
  EXPECT_EQ(one[1], FluxRational(1, 1));
  const auto three = enumerate_fluxes(3);
  const std::vector<FluxRational> expected = {{0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_EQ(three, expected);
  long total = 1;
  for (long q = 1; q <= 50; ++q) total += oracle::totient(q);
  EXPECT_EQ(static_cast<long>(enumerate_fluxes(50).size()), total);
  EXPECT_THROW(enumerate_fluxes(0), std::invalid_argument);
}

TEST(EnumerateFluxes, SortedReducedAndInUnitInterval) {
  for (int qmax : {2, 7, 19}) {
    const auto f = enumerate_fluxes(qmax);
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_EQ(std::gcd(f[i].p(), f[i].q()), 1);
      EXPECT_GE(f[i].fraction(), 0.0);
      EXPECT_LE(f[i].fraction(), 1.0);
      EXPECT_LE(f[i].q(), qmax);
      if (i > 0) {
        EXPECT_TRUE(f[i - 1].q() < f[i].q() || (f[i - 1].q() == f[i].q() && f[i - 1].p() < f[i].p()));
      }
    }
  }
}

TEST(GenerateButterfly, SquareQmaxOne) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::square(), 1);
  ASSERT_EQ(ds.records.size(), 2u);
  for (const auto& r : ds.records) {
    EXPECT_EQ(r.q, 1);
    EXPECT_NEAR(r.lo, -2.0, 1e-9);
    EXPECT_NEAR(r.hi, 2.0, 1e-9);
    EXPECT_FALSE(r.flat);
  }
  EXPECT_EQ(ds.records[0].p, 0);
  EXPECT_EQ(ds.records[1].p, 1);
}

TEST(GenerateButterfly, KagomeQmaxOne) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::kagome(0.0), 1);
  const auto at0 = band_multiset(ds, 0, 1);
  ASSERT_EQ(at0.size(), 3u);
  EXPECT_NEAR(at0[0].first, -2.0, 1e-9);
  EXPECT_NEAR(at0[0].second, -2.0, 1e-9);
  EXPECT_NEAR(at0[1].first, -2.0, 1e-9);
  EXPECT_NEAR(at0[1].second, 1.0, 1e-9);
  EXPECT_NEAR(at0[2].first, 1.0, 1e-9);
  EXPECT_NEAR(at0[2].second, 4.0, 1e-9);
  bool flat_record = false;
  for (const auto& r : ds.records) flat_record = flat_record || (r.p == 0 && r.flat && std::abs(r.lo + 2.0) < 1e-9);
  EXPECT_TRUE(flat_record);
}

TEST(GenerateButterfly, GrapheneQmaxTwoHasHalfFluxBands) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::hexagonal(), 2);
  const auto half = band_multiset(ds, 1, 2);
  const double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
  const std::vector<std::pair<double, double>> expected = {{-s6, -s3}, {-s3, 0.0}, {0.0, s3}, {s3, s6}};
  ASSERT_EQ(half.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_NEAR(half[k].first, expected[k].first, 1e-9);
    EXPECT_NEAR(half[k].second, expected[k].second, 1e-9);
  }
}

TEST(GenerateButterfly, RecordsSortedAndCountMatchesDimension) {
  const ModelSpec models[] = {ModelSpec::square(), ModelSpec::triangular(), ModelSpec::hexagonal(),
                              ModelSpec::kagome(0.3)};
  for (const ModelSpec& model : models) {
    const ButterflyDataset ds = generate_butterfly(model, 6);
    std::map<std::pair<long, long>, int> per_flux;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      const auto& r = ds.records[i];
      per_flux[{r.p, r.q}] += r.multiplicity;
      EXPECT_LE(r.lo, r.hi);
      EXPECT_EQ(std::gcd(r.p, r.q), 1);
      if (i > 0) {
        const auto& a = ds.records[i - 1];
        EXPECT_TRUE(std::tie(a.q, a.p, a.band_index) < std::tie(r.q, r.p, r.band_index));
      }
    }
    EXPECT_EQ(per_flux.size(), enumerate_fluxes(6).size());
    for (const auto& [key, total] : per_flux) EXPECT_EQ(total, model_dimension(model.kind, key.second));
    EXPECT_EQ(ds.outcomes.size(), per_flux.size());
  }
}

TEST(GenerateButterfly, DeterministicAcrossThreadCounts) {
  ButterflyOptions one;
  one.threads = 1;
  ButterflyOptions many;
  many.threads = 4;
  const ModelSpec model = ModelSpec::kagome(kPi / 8);
  EXPECT_EQ(to_csv(generate_butterfly(model, 7, one)), to_csv(generate_butterfly(model, 7, many)));
}

TEST(GenerateButterfly, SquareSymmetricUnderPToQMinusP) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::square(), 8);
  for (long q = 2; q <= 8; ++q)
    for (long p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto a = band_multiset(ds, p, q);
      const auto b = band_multiset(ds, q - p, q);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a[k].first, b[k].first, 1e-9) << p << "/" << q;
        EXPECT_NEAR(a[k].second, b[k].second, 1e-9) << p << "/" << q;
      }
    }
}

TEST(GenerateButterfly, ChambersAgreesWithGrid) {
  ButterflyOptions grid;
  grid.method = ButterflyMethod::kGrid;
  grid.grid_n = 201;
  // The acceptance suite covers all four models up to q = 8.
  const std::pair<ModelSpec, int> cases[] = {{ModelSpec::square(), 8}, {ModelSpec::kagome(0.0), 5}};
  for (const auto& [model, qmax] : cases) {
    const ButterflyDataset a = generate_butterfly(model, qmax);
    const ButterflyDataset b = generate_butterfly(model, qmax, grid);
    for (const FluxRational& f : enumerate_fluxes(qmax)) {
      const auto ea = band_multiset(a, f.p(), f.q());
      const auto eb = band_multiset(b, f.p(), f.q());
      ASSERT_EQ(ea.size(), eb.size()) << f.str();
      for (std::size_t k = 0; k < ea.size(); ++k) {
        EXPECT_NEAR(ea[k].first, eb[k].first, 1e-3) << to_string(model.kind) << " " << f.str();
        EXPECT_NEAR(ea[k].second, eb[k].second, 1e-3) << to_string(model.kind) << " " << f.str();
      }
    }
    for (const auto& o : b.outcomes) EXPECT_EQ(o.route, EdgeRoute::kGrid);
  }
}

TEST(GenerateButterfly, GridFallbackWhenChambersCannotCertify) {
  ButterflyOptions opts;
  opts.fit_tolerance = 1e-300;  // no fit certifies
  opts.grid_n = 31;
  const ButterflyDataset ds = generate_butterfly(ModelSpec::kagome(0.4), 3, opts);
  bool fell_back = false;
  for (const auto& o : ds.outcomes) fell_back = fell_back || (o.route == EdgeRoute::kGrid && !o.fallbacks.empty());
  EXPECT_TRUE(fell_back);
  EXPECT_NE(to_json(ds).dump().find("fallbacks"), std::string::npos);
}

TEST(ButterflyMethod, Parse) {
  EXPECT_EQ(parse_butterfly_method("grid"), ButterflyMethod::kGrid);
  EXPECT_EQ(parse_butterfly_method("chambers"), ButterflyMethod::kChambers);
  EXPECT_FALSE(parse_butterfly_method("spline").has_value());
  EXPECT_EQ(to_string(ButterflyMethod::kGrid), "grid");
}

TEST(Csv, EmptyDatasetIsHeaderOnly) {
  ButterflyDataset ds;
  EXPECT_EQ(to_csv(ds), "p,q,flux,band_index,lambda_min,lambda_max,flat,multiplicity\n");
}

TEST(Csv, OneRecordIsTwoLines) {
  ButterflyDataset ds;
  ds.records.push_back({1, 3, 1.0 / 3.0, 0, -1.0 / 7.0, 2.0, true, 2});
  const std::string csv = to_csv(ds);
  EXPECT_EQ(count(csv, "\n"), 2u);
  EXPECT_NE(csv.find("1,3,0.333333333333,0,-0.142857142857,2,1,2\n"), std::string::npos);
}

TEST(Csv, WritesIdenticalBytesTwice) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::triangular(), 5);
  const auto a = scratch("twice_a.csv"), b = scratch("twice_b.csv");
  write_csv(ds, a);
  write_csv(ds, b);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a), to_csv(ds));
  const auto ja = scratch("twice_a.json"), jb = scratch("twice_b.json");
  write_json(ds, ja);
  write_json(ds, jb);
  EXPECT_EQ(slurp(ja), slurp(jb));
}

TEST(Csv, IoErrorNamesPath) {
  ButterflyDataset ds;
  const std::filesystem::path bad = "/nonexistent_dir_for_tests/out.csv";
  try {
    write_csv(ds, bad);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

TEST(Json, MirrorsRecordFields) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::kagome(0.0), 2);
  const auto j = to_json(ds);
  ASSERT_EQ(j.at("records").size(), ds.records.size());
  const auto& r = j.at("records").at(0);
  for (const char* key : {"p", "q", "flux", "band_index", "lambda_min", "lambda_max", "flat", "multiplicity"})
    EXPECT_TRUE(r.contains(key)) << key;
  EXPECT_EQ(j.at("model").at("kind"), "kagome");
  EXPECT_EQ(j.at("qmax"), 2);
}

TEST(Svg, EmptyDatasetHasAxesOnly) {
  ButterflyDataset ds;
  const std::string svg = render_svg(ds, 400, 300);
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_EQ(count(svg, "<circle"), 0u);
  EXPECT_NE(svg.find("\xce\xbb"), std::string::npos);            // lambda label
  EXPECT_NE(svg.find("\xce\xb3/2\xcf\x80"), std::string::npos);  // gamma/2pi label
  EXPECT_NE(svg.find(">-2<"), std::string::npos);
  EXPECT_NE(svg.find(">2<"), std::string::npos);
}

TEST(Svg, OneSegmentPerRecordAndDotsForFlats) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::kagome(kPi / 8), 4);
  const std::string svg = render_svg(ds, 800, 800);
  EXPECT_TRUE(well_formed(svg));
  std::size_t flats = 0;
  for (const auto& r : ds.records) flats += r.flat ? 1 : 0;
  EXPECT_EQ(count(svg, "<circle"), flats);
  // Frame ticks: 3 on each axis.
  EXPECT_EQ(count(svg, "<line"), ds.records.size() - flats + 6);
}

TEST(Svg, FrameMapsSpectralRangeAndFluxAxis) {
  ButterflyDataset ds;
  ds.model = ModelSpec::square();
  ds.qmax = 1;
  ds.records.push_back({0, 1, 0.0, 0, -2.0, 2.0, false, 1});
  ds.records.push_back({1, 1, 1.0, 0, -2.0, 2.0, false, 1});
  SvgOptions opts;
  opts.margin_left = opts.margin_right = opts.margin_top = opts.margin_bottom = 0.0;
  const std::string svg = render_svg(ds, 100, 50, opts);
  EXPECT_NE(svg.find("<line x1=\"0.0000\" y1=\"50.0000\" x2=\"100.0000\" y2=\"50.0000\"/>"), std::string::npos);
  EXPECT_NE(svg.find("<line x1=\"0.0000\" y1=\"0.0000\" x2=\"100.0000\" y2=\"0.0000\"/>"), std::string::npos);
  EXPECT_NE(svg.find("stroke-width=\"25.0000\""), std::string::npos);  // max(0.3, 50 / 2)
}

TEST(Svg, DeterministicAndRejectsBadInput) {
  const ButterflyDataset ds = generate_butterfly(ModelSpec::square(), 5);
  EXPECT_EQ(render_svg(ds, 640, 480), render_svg(ds, 640, 480));
  EXPECT_THROW(render_svg(ds, -1, 10), std::invalid_argument);
  SvgOptions bad;
  bad.lambda_min = 1.0;
  bad.lambda_max = 1.0;
  EXPECT_THROW(render_svg(ds, 10, 10, bad), std::invalid_argument);
  SvgOptions titled;
  titled.title = "a<b";
  EXPECT_NE(render_svg(ds, 10, 10, titled).find("<title>a&lt;b</title>"), std::string::npos);
}
