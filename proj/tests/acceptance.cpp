// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skein/analysis.hpp"
#include "skein/cli.hpp"
#include "skein/error.hpp"
#include "skein/renderer.hpp"
#include "skein/selections.hpp"
#include "skein/text.hpp"
#include "support/cases.hpp"
#include "support/oracles.hpp"
#include "support/scenes.hpp"
#include "support/synthetic.hpp"
#include "support/truth_tables.hpp"

using namespace skein;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome intersection() {
  Outcome o;
  const auto t0 = Clock::now();
  constexpr double kTol = 1e-4;
  auto check = [&](const char* name, const cases::Agreement& a) {
    o.require(a.pairs == 1000, std::string(name) + " ran 1000 pairs");
    o.require(a.class_mismatches == 0, std::string(name) + " hit/miss agreement (" + std::to_string(a.class_mismatches) +
                                           " mismatches)");
    o.require(a.max_dt <= kTol, std::string(name) + " max |dt| " + num(a.max_dt));
    o.note(std::string(name) + " hits " + std::to_string(a.hits) + "/1000 max|dt| " + num(a.max_dt));
  };
  check("sphere", cases::sphere_suite(101, 1000));
  check("rounded-cone", cases::cone_suite(202, 1000));
  check("swept-quadratic", cases::swept_suite(303, 1000, 100000));
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime under 60 s");
  o.note("runtime " + num(secs) + " s");
  return o;
}

Outcome clipping() {
  Outcome o;
  const auto c = cases::clip_suite(404, 1000);
  o.require(c.scenes == 1000, "1000 scenes");
  o.require(c.removed_side_violations == 0, "no hit on a removed half space");
  o.require(c.cap_plane_violations == 0, "cap hits on their plane within 1e-7");
  o.require(c.exempt_changes == 0, "exempt primitives bit-identical");
  o.require(c.classification_mismatches == 0, "hit kind agrees with the interval reference");
  o.note("surface " + std::to_string(c.surface_hits) + ", cap " + std::to_string(c.cap_hits) + ", max|dt| " +
         num(c.max_dt));
  return o;
}

Outcome sasa() {
  Outcome o;
  const double r = 1.0, p = 1.4, rp = r + p;
  const double lone = 4.0 * std::numbers::pi * rp * rp;
  const ChromatinModel one("one", {{0, 0, 0}}, {}, 1);
  const double got = compute_sasa(one, {r, p, 960}).values[0];
  o.require(std::abs(got - lone) / lone <= 0.02, "isolated sphere within 2%");

  const double d = 2.4;
  const ChromatinModel two("two", {{0, 0, 0}, {d, 0, 0}}, {}, 1);
  const double exact = oracle::two_sphere_area(rp, d);
  auto err = [&](int n) {
    const auto res = compute_sasa(two, {r, p, n});
    return std::max(std::abs(res.values[0] - exact), std::abs(res.values[1] - exact)) / exact;
  };
  const double e92 = err(92), e960 = err(960);
  o.require(e960 <= 0.02, "two-sphere overlap within 2% at 960 samples");
  o.require(e960 < e92, "error at 960 below error at 92");
  o.note("isolated rel err " + num(std::abs(got - lone) / lone) + ", pair rel err 92: " + num(e92) + ", 960: " +
         num(e960));
  return o;
}

Outcome distance_maps() {
  Outcome o;
  const auto m = synth::scatter(1024, 99, 3.0);
  long mismatches = 0, axiom_failures = 0;
  for (int level = 0; level <= 3; ++level) {
    const auto t = distance_map(m, level);
    const auto merged = oracle::merged_positions(m, level);
    if (t.row_count() != merged.size()) {
      o.require(false, "level " + std::to_string(level) + " size");
      continue;
    }
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (t.at(i, i) != 0.0) ++axiom_failures;
      for (std::size_t j = 0; j < merged.size(); ++j) {
        const Vec3 a = merged[i], b = merged[j];
        const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
        if (t.at(i, j) != std::sqrt(dx * dx + dy * dy + dz * dz)) ++mismatches;
        if (t.at(i, j) != t.at(j, i)) ++axiom_failures;
      }
    }
    // tiles carved from the map obey the same axioms
    const std::size_t n = merged.size();
    const auto tile = distance_tile(m, level, {0, n / 2}, {n / 4, n - 1});
    for (std::size_t i = 0; i < tile.row_count(); ++i)
      for (std::size_t j = 0; j < tile.col_count(); ++j)
        if (tile.at(i, j) != t.at(i, n / 4 + j)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " entries differ from brute force");
  o.require(axiom_failures == 0, "symmetry and zero diagonal");

  std::mt19937_64 rng(15);
  const auto full = distance_map(m, 0);
  long sel_bad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    BinSet sel(m.size());
    for (BinIndex b = 0; b < m.size(); ++b)
      if (rng() % 3 == 0) sel.set(b);
    const auto s = distance_map_for_selection(m, sel, 0);
    const auto idx = sel.indices();
    if (s.bins != idx) ++sel_bad;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (s.tile.at(i, j) != full.at(idx[i], idx[j])) ++sel_bad;
  }
  o.require(sel_bad == 0, "selection maps equal the masked map");
  o.note("levels 0-3 on 1024 bins exact, 20 selection maps");
  return o;
}

Outcome radius_rule() {
  Outcome o;
  const std::vector<double> uniform{1, 1, 1, 1};
  o.require(estimate_tube_radius(uniform).default_radius == 0.5, "[1,1,1,1] gives 0.5");
  const std::vector<double> steps{2, 2, 4, 4};
  o.require(estimate_tube_radius(steps).default_radius == 1.0, "[2,2,4,4] gives 1.0");

  std::mt19937_64 rng(21);
  std::lognormal_distribution<double> spacing(0.0, 0.6);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(1 + rng() % 60);
    for (auto& v : s) v = spacing(rng);
    const double k = std::pow(10.0, log_scale(rng));
    std::vector<double> scaled(s);
    for (auto& v : scaled) v *= k;
    const auto a = estimate_tube_radius(s), b = estimate_tube_radius(scaled);
    for (auto [x, y] : {std::pair{a.lower, b.lower}, {a.default_radius, b.default_radius}, {a.upper, b.upper}})
      worst = std::max(worst, std::abs(y - k * x) / (k * x));
  }
  // arbitrary real factors round; equality holds to a few ulps
  o.require(worst <= 1e-12, "scale equivariance, worst relative gap " + num(worst));
  o.note("100 scaled vectors, worst relative gap " + num(worst));
  return o;
}

Outcome selection() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 6.0);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = synth::scatter(200 + rng() % 800, rng(), 5.0);
    const double r = u(rng);
    const BinIndex c = rng() % m.size();
    if (select_sphere(m, c, r).indices() != oracle::sphere_scan(m, m.bin(c), r)) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " sphere selections differ from the scan");
  const auto seq = BinSet::from_range(10, select_sequence(5, 2, 10)).indices();
  o.require(seq == std::vector<BinIndex>{2, 3, 4, 5}, "sequence (5,2) gives {2,3,4,5}");
  int prec_rows = 0, vis_rows = 0;
  const int prec = truth::precedence_mismatches(&prec_rows);
  const int vis = truth::visibility_mismatches(&vis_rows);
  o.require(prec == 0, "precedence truth table");
  o.require(vis == 0, "visibility truth table");
  o.note("100 sphere instances, truth tables " + std::to_string(prec_rows) + "+" + std::to_string(vis_rows) + " rows");
  return o;
}

Outcome ssao() {
  Outcome o;
  const auto p = scenes::probe();
  o.require(p.corner - p.wall >= 0.1, "corner exceeds wall by 0.1");
  o.require(p.wall - p.silhouette >= 0.1, "wall exceeds silhouette by 0.1");
  o.note("corner " + num(p.corner) + ", wall " + num(p.wall) + ", silhouette " + num(p.silhouette));

  const auto m = normalize_model(synth::globule(2000, 1, 5));
  SceneDescription d;
  d.primitives = build_smooth_tube(m, 0.04);
  d.bin_count = m.size();
  const Scene scene(std::move(d));
  const auto cam = Camera::framing(scene.bounds(), 160, 160);
  const auto g = render_gbuffer(scene, cam);
  const auto near = ssao_pass(g, cam, 0.16, 16, 9);
  const auto far = ssao_pass(g, cam, 0.25, 16, 10);
  const auto both = combine_ssao(near, far);
  long below = 0;
  for (std::size_t i = 0; i < both.values.size(); ++i)
    if (both.values[i] < std::max(near.values[i], far.values[i])) ++below;
  o.require(below == 0, "combined occlusion at least max(near, far)");

  RenderSettings s;
  s.ssao = SsaoSettings{0.16, 0.25, 16, 9, 1.0};
  const auto a = render(scene, cam, s), b = render(scene, cam, s);
  o.require(ssao_pass(g, cam, 0.16, 16, 9).values == near.values, "same seed, identical near buffer");
  o.require(a.occlusion.values == b.occlusion.values && a.image == b.image, "same seed, identical render");
  return o;
}

Outcome performance() {
  Outcome o;
  const auto m = normalize_model(synth::globule(25000, 1, 2024));
  const double radius = estimate_tube_radius(inter_bin_spacings(m)).default_radius;
  SceneDescription d;
  d.primitives = build_smooth_tube(m, radius);
  d.bin_count = m.size();
  const auto build0 = Clock::now();
  const Scene scene(std::move(d));
  const double build_s = seconds_since(build0);
  const auto cam = Camera::framing(scene.bounds(), 512, 512);

  RenderSettings settings;
  SsaoSettings ao;
  ao.radius_far = 0.25;
  ao.radius_near = std::min(4.0 * radius, 0.5 * ao.radius_far);
  ao.samples_per_pixel = 16;
  ao.seed = 1;
  settings.ssao = ao;
  const auto t0 = Clock::now();
  const auto r = render(scene, cam, settings);
  const double total = seconds_since(t0);
  o.require(total <= 10.0, "full render within 10 s (took " + num(total) + " s)");
  o.require(r.timings.gbuffer_s <= 2.0, "G-buffer within 2 s (took " + num(r.timings.gbuffer_s) + " s)");

  // grid versus brute force on rays sampled from the same camera
  std::vector<Ray> rays;
  for (int y = 0; y < 512; y += 16)
    for (int x = 0; x < 512; x += 32) rays.push_back(cam.primary_ray(x, y));
  std::size_t agree = 0;
  auto g0 = Clock::now();
  std::vector<std::optional<Hit>> grid_hits;
  for (const auto& ray : rays) grid_hits.push_back(scene.trace(ray));
  const double grid_s = seconds_since(g0);
  g0 = Clock::now();
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto h = scene.trace_brute_force(rays[i]);
    agree += h.has_value() == grid_hits[i].has_value() && (!h || h->bin_id == grid_hits[i]->bin_id);
  }
  const double brute_s = seconds_since(g0);
  const double speedup = brute_s / std::max(grid_s, 1e-9);
  o.require(speedup >= 5.0, "grid speedup at least 5x (got " + num(speedup) + "x)");
  o.require(agree == rays.size(), "grid and brute force agree on sampled rays");
  o.note(std::to_string(scene.primitives().size()) + " primitives, build " + num(build_s) + " s, gbuffer " +
         num(r.timings.gbuffer_s) + " s, ssao " + num(r.timings.ssao_s) + " s, total " + num(total) + " s, " +
         std::to_string(worker_count()) + " workers, grid speedup " + num(speedup) + "x over " +
         std::to_string(rays.size()) + " rays");
  return o;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "skein");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  std::istringstream in;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, in);
  if (out_text) *out_text = out.str();
  return code;
}

Outcome formats() {
  Outcome o;
  // skein-xyz
  const auto m = normalize_model(synth::globule(2000, 3, 17, 5000));
  const std::string xyz = serialize_model(m);
  const auto back = parse_model(xyz, m.name(), m.resolution_bp());
  o.require(back == m, "skein-xyz parse(serialize) is the identity");
  o.require(serialize_model(back) == xyz, "skein-xyz bytes stable");

  // BED
  std::mt19937_64 rng(4);
  std::string bed;
  for (int i = 0; i < 5000; ++i) {
    const auto start = static_cast<std::int64_t>(rng() % 1'000'000);
    bed += "chr" + std::to_string(1 + rng() % 22) + "\t" + std::to_string(start) + "\t" +
           std::to_string(start + 1 + static_cast<std::int64_t>(rng() % 5000)) + "\tf" + std::to_string(i) + "\t" +
           text::format_double(std::ldexp(double(rng() % 100000), -7)) + "\n";
  }
  o.require(serialize_bed(parse_bed(bed)) == bed, "BED bytes stable");

  // CLI determinism on a render and on SASA output
  const auto dir = std::filesystem::temp_directory_path() / ("skein-acceptance-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  const std::string model = (dir / "m.xyz").string();
  text::write_file(model, serialize_model(synth::globule(600, 2, 3, 5000)));
  const std::string a = (dir / "a.ppm").string(), b = (dir / "b.ppm").string();
  const std::vector<std::string> common{"render", "--model", model, "--width", "128", "--height", "96", "--seed", "3"};
  auto with_out = [&](std::string path) {
    auto v = common;
    v.push_back("--out");
    v.push_back(std::move(path));
    return v;
  };
  const int ra = cli(with_out(a)), rb = cli(with_out(b));
  o.require(ra == 0 && rb == 0, "render exits 0");
  o.require(text::read_file(a) == text::read_file(b), "two renders give identical bytes");
  std::string s1, s2;
  cli({"sasa", "--model", model}, &s1);
  cli({"sasa", "--model", model}, &s2);
  o.require(!s1.empty() && s1 == s2, "two SASA runs give identical bytes");
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);

  // human genome bin count
  const auto whole = bins_for_length(3'100'000'000LL, 15000);
  o.require(std::abs(whole - 207000.0) / 207000.0 <= 0.01, "3.1 Gbp at 15 kb within 1% of 207,000");
  std::string report;
  const int rg = cli({"genome", "--lengths", std::string(SKEIN_SOURCE_DIR) + "/data/genomes/grch38.tsv", "--resolution",
                      "15000"},
                     &report);
  const auto pos = report.find("bins: ");
  const double per_chrom = pos == std::string::npos ? 0.0 : std::stod(report.substr(pos + 6));
  o.require(rg == 0 && std::abs(per_chrom - 207000.0) / 207000.0 <= 0.01, "GRCh38 table within 1% of 207,000");
  o.note("3.1 Gbp -> " + std::to_string(whole) + " bins, GRCh38 per-chromosome -> " + num(per_chrom) + " bins");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"intersection oracle suite", intersection},
      {"clipping soundness", clipping},
      {"SASA analytic checks", sasa},
      {"distance map equivalence", distance_maps},
      {"IQR radius rule", radius_rule},
      {"selection oracle", selection},
      {"SSAO behavior", ssao},
      {"performance", performance},
      {"format fidelity", formats},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
