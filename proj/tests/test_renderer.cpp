#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>

#include "skein/error.hpp"
#include "skein/renderer.hpp"
#include "support/scenes.hpp"
#include "support/synthetic.hpp"

using namespace skein;

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scene tangle_scene(std::size_t bins, std::uint64_t seed, double radius) {
  const auto m = normalize_model(synth::globule(bins, 1, seed));
  SceneDescription d;
  d.primitives = build_smooth_tube(m, radius);
  d.bin_count = m.size();
  return Scene(std::move(d));
}

double luma(const Image& img, std::size_t i) {
  return 0.2126 * img.rgb[3 * i] + 0.7152 * img.rgb[3 * i + 1] + 0.0722 * img.rgb[3 * i + 2];
}

// Variance over depth layers of the per-layer mean luminance; layers are depth quantiles
// of the hit pixels.
double layer_variance(const GBuffer& g, const Image& img, int layers) {
  std::vector<std::pair<double, std::size_t>> hits;
  for (std::size_t i = 0; i < g.samples.size(); ++i)
    if (g.samples[i].hit) hits.push_back({g.samples[i].depth, i});
  std::sort(hits.begin(), hits.end());
  std::vector<double> means;
  for (int l = 0; l < layers; ++l) {
    const std::size_t a = hits.size() * l / layers, b = hits.size() * (l + 1) / layers;
    double s = 0.0;
    for (std::size_t k = a; k < b; ++k) s += luma(img, hits[k].second);
    means.push_back(s / double(b - a));
  }
  double mu = 0.0;
  for (double m : means) mu += m / layers;
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu) / layers;
  return var;
}

}  // namespace

TEST_CASE("camera validation") {
  Camera c;
  CHECK_NOTHROW(c.validate());
  c.width = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = Camera{};
  c.target = c.position;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = Camera{};
  c.vertical_fov = 180;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = Camera{};
  c.near = 2;
  c.far = 1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = Camera{};
  c.up = {0, 0, 1};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);

  const Scene empty(SceneDescription{});
  Camera zero;
  zero.height = 0;
  CHECK_THROWS_AS(render_gbuffer(empty, zero), InvalidArgument);
}

TEST_CASE("camera: rays and projection agree") {
  Camera c;
  c.position = {1, 2, 5};
  c.target = {0, 0.5, 0};
  c.width = 64;
  c.height = 48;
  c.vertical_fov = 50;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const int x = static_cast<int>(rng() % 64), y = static_cast<int>(rng() % 48);
    const Ray r = c.primary_ray(x, y);
    CHECK(length(r.direction) == doctest::Approx(1.0).epsilon(1e-12));
    const auto p = c.project(r.at(3.7));
    REQUIRE(p);
    CHECK(p->x == doctest::Approx(x + 0.5).epsilon(1e-9));
    CHECK(p->y == doctest::Approx(y + 0.5).epsilon(1e-9));
  }
  CHECK_FALSE(c.project(c.position - c.forward()));
  // top row looks up
  CHECK(dot(c.primary_ray(32, 0).direction, c.true_up()) > 0.0);
  CHECK(dot(c.primary_ray(63, 24).direction, c.right()) > 0.0);
}

TEST_CASE("empty scene: every pixel misses") {
  const Scene empty(SceneDescription{});
  Camera c;
  c.width = 16;
  c.height = 9;
  const auto g = render_gbuffer(empty, c);
  CHECK(g.samples.size() == 144);
  for (const auto& s : g.samples) CHECK_FALSE(s.hit);
}

TEST_CASE("single sphere: disc radius matches the pinhole projection") {
  const auto cam = scenes::lone_sphere_camera();
  const auto g = render_gbuffer(scenes::lone_sphere(), cam);
  const double angular = std::asin(1.0 / 12.0);
  const double expected = std::tan(angular) / std::tan(cam.vertical_fov * std::numbers::pi / 360.0) * (cam.height / 2.0);
  const int mid = cam.height / 2;
  int across = 0, down = 0;
  for (int x = 0; x < cam.width; ++x) across += g.at(x, mid).hit;
  for (int y = 0; y < cam.height; ++y) down += g.at(mid, y).hit;
  CHECK(std::abs(across / 2.0 - expected) <= 1.0);
  CHECK(std::abs(down / 2.0 - expected) <= 1.0);
  CHECK(g.at(mid, mid).depth == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("near and far planes filter hits") {
  auto cam = scenes::lone_sphere_camera();
  cam.far = 10.0;
  const auto g = render_gbuffer(scenes::lone_sphere(), cam);
  for (const auto& s : g.samples) CHECK_FALSE(s.hit);
}

TEST_CASE("gbuffer bin ids agree with pick at 1000 pixels") {
  const auto m = normalize_model(synth::globule(800, 3, 12));
  SceneDescription d;
  d.primitives = build_straight_tube(m, 0.08);
  d.bin_count = m.size();
  d.planes = {CuttingPlane::along_axis(Axis::x, 0.1, KeepSide::negative)};
  const Scene scene(d);
  const auto cam = Camera::framing(scene.bounds(), 160, 120, {1, 0.5, 0.3});
  const auto g = render_gbuffer(scene, cam);
  std::mt19937_64 rng(3);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const int x = static_cast<int>(rng() % 160), y = static_cast<int>(rng() % 120);
    const auto picked = scene.pick(cam.primary_ray(x, y));
    const auto& s = g.at(x, y);
    REQUIRE(s.hit == picked.has_value());
    if (s.hit) {
      ++hits;
      CHECK(s.bin_id == *picked);
    }
  }
  CHECK(hits > 80);
}

TEST_CASE("phong: facing, grazing and the energy bound") {
  GBuffer g;
  g.width = 3;
  g.height = 1;
  Camera cam;
  cam.position = {0, 0, 5};
  auto sample = [](Vec3 n) {
    GSample s;
    s.hit = true;
    s.position = {0, 0, 0};
    s.normal = n;
    return s;
  };
  g.samples = {sample({0, 0, 1}), sample({1, 0, 0}), GSample{}};
  Light light;
  light.specular = 0.0;
  const std::vector<Rgb> mat{{200, 100, 50}};
  auto c = shade_phong(g, cam, light, mat, {1, 2, 3});
  CHECK(c.pixels[0][0] == doctest::Approx(200 / 255.0 * (light.ambient + light.diffuse)));
  CHECK(c.pixels[1][0] == doctest::Approx(200 / 255.0 * light.ambient));
  CHECK(c.pixels[1][2] == doctest::Approx(50 / 255.0 * light.ambient));
  CHECK(c.pixels[2][1] == doctest::Approx(2 / 255.0));

  // two-sided: a back-facing normal shades like a front-facing one
  g.samples[1] = sample({0, 0, -1});
  c = shade_phong(g, cam, Light{}, {}, {});
  CHECK(c.pixels[1] == c.pixels[0]);
  CHECK(c.pixels[0][0] == 1.0);  // 0.2 + 0.7 + 0.25 clamps

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Light dim{0.1, 0.3, 0.2, 8};
  for (int i = 0; i < 500; ++i) {
    g.samples[0] = sample(normalized({n(rng), n(rng), n(rng)}));
    g.samples[0].position = {n(rng), n(rng), n(rng)};
    c = shade_phong(g, cam, dim, {}, {});
    for (double ch : c.pixels[0]) {
      CHECK(ch >= dim.ambient - 1e-12);
      CHECK(ch <= dim.ambient + dim.diffuse + dim.specular + 1e-12);
    }
  }

  g.samples[0].bin_id = 4;
  CHECK_THROWS_AS(shade_phong(g, cam, dim, mat, {}), InvalidArgument);
}

TEST_CASE("ssao: canonical scene ordering") {
  const auto p = scenes::probe();
  MESSAGE("corner " << p.corner << ", wall " << p.wall << ", silhouette " << p.silhouette);
  CHECK(p.corner > 0.6);
  CHECK(p.silhouette < 0.1);
  CHECK(p.corner - p.wall >= 0.1);
  CHECK(p.wall - p.silhouette >= 0.1);
}

TEST_CASE("ssao: deterministic, seed-sensitive, zero on misses") {
  const auto cam = scenes::lone_sphere_camera();
  const auto g = render_gbuffer(scenes::lone_sphere(), cam);
  const auto a = ssao_pass(g, cam, 0.5, 16, 42);
  const auto b = ssao_pass(g, cam, 0.5, 16, 42);
  const auto c = ssao_pass(g, cam, 0.5, 16, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    CHECK(a.values[i] >= 0.0);
    CHECK(a.values[i] <= 1.0);
    if (!g.samples[i].hit) CHECK(a.values[i] == 0.0);
  }
  CHECK_THROWS_AS(ssao_pass(g, cam, 0.0, 16, 1), InvalidArgument);
}

TEST_CASE("ssao: combination rule") {
  OcclusionBuffer n{2, 2, {0.0, 1.0, 0.3, 0.5}};
  OcclusionBuffer f{2, 2, {0.0, 0.2, 1.0, 0.5}};
  const auto c = combine_ssao(n, f);
  CHECK(c.values[0] == 0.0);
  CHECK(c.values[1] == 1.0);
  CHECK(c.values[2] == 1.0);
  CHECK(c.values[3] == doctest::Approx(0.75));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OcclusionBuffer rn{100, 100, {}}, rf{100, 100, {}};
  for (int i = 0; i < 10000; ++i) {
    rn.values.push_back(u(rng));
    rf.values.push_back(u(rng));
  }
  const auto rc = combine_ssao(rn, rf);
  for (int i = 0; i < 10000; ++i) CHECK(rc.values[i] >= std::max(rn.values[i], rf.values[i]));
  CHECK_THROWS_AS(combine_ssao(n, rn), InvalidArgument);
}

TEST_CASE("composite") {
  ColorBuffer col{2, 1, {{0.5, 0.25, 1.0}, {1.0, 1.0, 1.0}}};
  const OcclusionBuffer occ{2, 1, {0.0, 1.0}};
  const auto img = composite(col, occ, 1.0);
  CHECK(img.rgb == std::vector<std::uint8_t>{128, 64, 255, 0, 0, 0});
  CHECK(composite(col, {}, 1.0).rgb == std::vector<std::uint8_t>{128, 64, 255, 255, 255, 255});
  CHECK(composite(col, occ, 0.5).rgb[3] == 128);
  CHECK_THROWS_AS(composite(col, OcclusionBuffer{1, 1, {0.0}}, 1.0), InvalidArgument);
}

TEST_CASE("dual ssao separates depth layers better than phong alone") {
  const Scene scene = tangle_scene(3000, 21, 0.035);
  const auto cam = Camera::framing(scene.bounds(), 192, 192);
  RenderSettings phong;
  const auto plain = render(scene, cam, phong);
  RenderSettings ao;
  ao.ssao = SsaoSettings{4 * 0.035, 0.25, 16, 3, 1.0};
  const auto shaded = render(scene, cam, ao);
  const double v_plain = layer_variance(plain.gbuffer, plain.image, 8);
  const double v_ao = layer_variance(shaded.gbuffer, shaded.image, 8);
  MESSAGE("layer luminance variance: phong " << v_plain << ", ssao " << v_ao);
  CHECK(v_ao > v_plain);
}

TEST_CASE("render is deterministic across runs and thread counts") {
  const Scene scene = tangle_scene(400, 2, 0.05);
  const auto cam = Camera::framing(scene.bounds(), 64, 64);
  RenderSettings s;
  s.ssao = SsaoSettings{0.2, 0.5, 16, 11, 1.0};
  s.bin_colors.assign(400, Rgb{200, 120, 40});
  const auto a = render(scene, cam, s);
  setenv("SKEIN_THREADS", "1", 1);
  const auto b = render(scene, cam, s);
  unsetenv("SKEIN_THREADS");
  CHECK(a.image == b.image);
  CHECK(a.occlusion.values == b.occlusion.values);

  // Golden hash, generated once by this implementation.
  const auto hash = fnv1a(encode_ppm(a.image));
  MESSAGE("golden hash " << hash);
  CHECK(hash == 10425885851393038701ULL);
}

TEST_CASE("ssao settings validation") {
  SsaoSettings s;
  CHECK_NOTHROW(s.validate());
  s.radius_near = 0.3;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = SsaoSettings{};
  s.samples_per_pixel = 4;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("ppm bytes and round trips") {
  const Image white{1, 1, {255, 255, 255}};
  CHECK(encode_ppm(white) == std::string("P6\n1 1\n255\n\xff\xff\xff", 14));
  std::mt19937_64 rng(2);
  Image img{7, 5, {}};
  for (int i = 0; i < 7 * 5 * 3; ++i) img.rgb.push_back(static_cast<std::uint8_t>(rng()));
  CHECK(decode_ppm(encode_ppm(img)) == img);
  CHECK(decode_png(encode_png(img)) == img);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n0 0 0"), ParseError);
  CHECK_THROWS_AS(decode_ppm("P6\n2 2\n255\n\xff"), ParseError);
  CHECK_THROWS(decode_png("not a png"));

  const auto dir = std::filesystem::temp_directory_path() / "skein_renderer_test";
  std::filesystem::create_directories(dir);
  for (auto fmt : {ImageFormat::ppm, ImageFormat::png}) {
    const auto path = (dir / (fmt == ImageFormat::png ? "a.png" : "a.ppm")).string();
    write_image(img, path, fmt);
    CHECK(read_image(path) == img);
    CHECK(image_format_for(path) == fmt);
  }
  CHECK_THROWS_AS(write_image(img, (dir / "missing" / "x.ppm").string(), ImageFormat::ppm), IoError);
  CHECK(parse_image_format("png") == ImageFormat::png);
  CHECK_THROWS_AS(parse_image_format("gif"), InvalidArgument);
  std::filesystem::remove_all(dir);
}
