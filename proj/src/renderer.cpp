#include "skein/renderer.hpp"

#include <png.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <thread>

#include "skein/error.hpp"
#include "skein/text.hpp"

namespace skein {

namespace {

double tan_half_fov(const Camera& c) { return std::tan(c.vertical_fov * std::numbers::pi / 360.0); }

template <typename F>
void parallel_rows(int height, F&& row) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max(height, 1)));
  if (workers <= 1) {
    for (int y = 0; y < height; ++y) row(y);
    return;
  }
  std::atomic<int> next{0};
  auto work = [&] {
    for (int y = next++; y < height; y = next++) row(y);
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Halton points in the unit ball with a seeded Cranley-Patterson shift.
std::vector<Vec3> ball_samples(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double shift[3] = {unit_from_bits(rng()), unit_from_bits(rng()), unit_from_bits(rng())};
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<std::uint64_t>(i + 1);
    const double u1 = std::fmod(radical_inverse(k, 2) + shift[0], 1.0);
    const double u2 = std::fmod(radical_inverse(k, 3) + shift[1], 1.0);
    const double u3 = std::fmod(radical_inverse(k, 5) + shift[2], 1.0);
    const double z = 1.0 - 2.0 * u1;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * std::numbers::pi * u2;
    const double r = std::cbrt(u3);
    out.push_back(Vec3{s * std::cos(phi), s * std::sin(phi), z} * r);
  }
  return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)); }

void check_image(const Image& image) {
  if (image.width <= 0 || image.height <= 0) throw InvalidArgument("image has zero area");
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3)
    throw InvalidArgument("image pixel data does not match its dimensions");
}

}  // namespace

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("viewport has zero area");
  if (!is_finite(position) || !is_finite(target) || !is_finite(up)) throw InvalidArgument("camera vectors must be finite");
  if (position == target) throw InvalidArgument("camera position equals target");
  if (!(vertical_fov > 0.0 && vertical_fov < 180.0)) throw InvalidArgument("field of view must be in (0, 180)");
  if (!(near < far) || !(near >= 0.0)) throw InvalidArgument("camera needs 0 <= near < far");
  if (length(cross(target - position, up)) < 1e-12 * length(target - position) * length(up))
    throw InvalidArgument("camera up vector is parallel to the view direction");
}

Vec3 Camera::forward() const { return normalized(target - position); }
Vec3 Camera::right() const { return normalized(cross(forward(), up)); }
Vec3 Camera::true_up() const { return cross(right(), forward()); }

Ray Camera::ray_through(double x, double y) const {
  const double th = tan_half_fov(*this);
  const double aspect = static_cast<double>(width) / height;
  const double xn = (2.0 * x / width - 1.0) * th * aspect;
  const double yn = (1.0 - 2.0 * y / height) * th;
  return {position, normalized(forward() + right() * xn + true_up() * yn)};
}

Ray Camera::primary_ray(int px, int py) const { return ray_through(px + 0.5, py + 0.5); }

std::optional<Camera::Projection> Camera::project(const Vec3& p) const {
  const Vec3 v = p - position;
  const double depth = dot(v, forward());
  if (!(depth > 0.0)) return std::nullopt;
  const double th = tan_half_fov(*this);
  const double aspect = static_cast<double>(width) / height;
  const double xn = dot(v, right()) / depth;
  const double yn = dot(v, true_up()) / depth;
  return Projection{(xn / (th * aspect) + 1.0) * 0.5 * width, (1.0 - yn / th) * 0.5 * height, depth};
}

Camera Camera::framing(const Aabb& box, int width, int height, Vec3 direction, double vertical_fov) {
  Camera c;
  c.width = width;
  c.height = height;
  c.vertical_fov = vertical_fov;
  const Vec3 center = box.empty() ? Vec3{} : (box.lo + box.hi) * 0.5;
  const double radius = box.empty() ? 1.0 : std::max(0.5 * length(box.hi - box.lo), 1e-9);
  const double half_v = vertical_fov * std::numbers::pi / 360.0;
  const double half_h = std::atan(std::tan(half_v) * width / std::max(height, 1));
  const double dist = 1.05 * radius / std::sin(std::min(half_v, half_h));
  const Vec3 dir = normalized(direction);
  c.target = center;
  c.position = center + dir * dist;
  c.up = std::abs(dir.y) > 0.99 ? Vec3{0, 0, -1} : Vec3{0, 1, 0};
  c.near = std::max(1e-6, 0.5 * (dist - radius));
  c.far = dist + 2.0 * radius;
  return c;
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SKEIN_THREADS")) {
    if (const auto v = text::parse_int(env); v && *v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(*v));
  }
  return n;
}

GBuffer render_gbuffer(const Scene& scene, const Camera& camera, IntersectStats* stats) {
  camera.validate();
  GBuffer g;
  g.width = camera.width;
  g.height = camera.height;
  g.samples.resize(static_cast<std::size_t>(g.width) * g.height);
  const Vec3 fwd = camera.forward();
  parallel_rows(g.height, [&](int y) {
    for (int x = 0; x < g.width; ++x) {
      const Ray ray = camera.primary_ray(x, y);
      const auto hit = scene.trace(ray, stats);
      if (!hit) continue;
      const double depth = hit->t * dot(ray.direction, fwd);
      if (depth < camera.near || depth > camera.far) continue;
      GSample& s = g.samples[static_cast<std::size_t>(y) * g.width + x];
      s.hit = true;
      s.kind = hit->kind;
      s.bin_id = hit->bin_id;
      s.depth = depth;
      s.position = hit->position;
      s.normal = hit->normal;
    }
  });
  return g;
}

ColorBuffer shade_phong(const GBuffer& gbuffer, const Camera& camera, const Light& light,
                        std::span<const Rgb> materials, Rgb background) {
  ColorBuffer out;
  out.width = gbuffer.width;
  out.height = gbuffer.height;
  out.pixels.resize(gbuffer.samples.size());
  const std::array<double, 3> bg{background.r / 255.0, background.g / 255.0, background.b / 255.0};
  for (std::size_t i = 0; i < gbuffer.samples.size(); ++i) {
    const GSample& s = gbuffer.samples[i];
    if (!s.hit) {
      out.pixels[i] = bg;
      continue;
    }
    Rgb m{255, 255, 255};
    if (!materials.empty()) {
      if (s.bin_id >= materials.size()) throw InvalidArgument("material list shorter than the bin count");
      m = materials[s.bin_id];
    }
    const Vec3 to_light = normalized(camera.position - s.position);
    // Two-sided, so cameras placed inside the geometry still see lit walls.
    const double ndl = std::min(1.0, std::abs(dot(s.normal, to_light)));
    // With the light at the eye, R.V reduces to 2(N.L)^2 - 1.
    const double rdv = std::max(0.0, 2.0 * ndl * ndl - 1.0);
    const double spec = light.specular * std::pow(rdv, light.shininess);
    const double k = light.ambient + light.diffuse * ndl;
    out.pixels[i] = {std::min(1.0, m.r / 255.0 * k + spec), std::min(1.0, m.g / 255.0 * k + spec),
                     std::min(1.0, m.b / 255.0 * k + spec)};
  }
  return out;
}

void SsaoSettings::validate() const {
  if (!(radius_near > 0.0 && radius_near < radius_far)) throw InvalidArgument("SSAO needs 0 < radius_near < radius_far");
  if (samples_per_pixel < 8) throw InvalidArgument("SSAO needs at least 8 samples per pixel");
  if (!(strength >= 0.0)) throw InvalidArgument("SSAO strength must be non-negative");
}

OcclusionBuffer ssao_pass(const GBuffer& gbuffer, const Camera& camera, double radius, int samples,
                          std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("SSAO radius must be positive");
  if (samples < 1) throw InvalidArgument("SSAO needs at least one sample");
  OcclusionBuffer out;
  out.width = gbuffer.width;
  out.height = gbuffer.height;
  out.values.assign(gbuffer.samples.size(), 0.0);
  const std::vector<Vec3> kernel = ball_samples(samples, seed);
  const Vec3 fwd = camera.forward();
  const Vec3 right = camera.right();
  const Vec3 up = camera.true_up();
  const double bias = 0.02 * radius;

  parallel_rows(gbuffer.height, [&](int y) {
    for (int x = 0; x < gbuffer.width; ++x) {
      const GSample& s = gbuffer.at(x, y);
      if (!s.hit) continue;
      // Per-pixel rotation about the view axis breaks up banding; a pure function of
      // (seed, pixel) so the result does not depend on scheduling.
      const double angle =
          2.0 * std::numbers::pi * unit_from_bits(splitmix64(seed ^ splitmix64((std::uint64_t(y) << 32) | std::uint32_t(x))));
      const double ca = std::cos(angle);
      const double sa = std::sin(angle);
      int occluded = 0;
      for (const Vec3& k : kernel) {
        const Vec3 offset = right * (k.x * ca - k.y * sa) + up * (k.x * sa + k.y * ca) + fwd * k.z;
        const auto proj = camera.project(s.position + offset * radius);
        if (!proj) continue;
        const int px = static_cast<int>(std::floor(proj->x));
        const int py = static_cast<int>(std::floor(proj->y));
        if (px < 0 || py < 0 || px >= gbuffer.width || py >= gbuffer.height) continue;
        const GSample& o = gbuffer.at(px, py);
        if (!o.hit) continue;
        if (o.depth < proj->depth - bias && std::abs(o.depth - s.depth) < radius) ++occluded;
      }
      out.values[static_cast<std::size_t>(y) * gbuffer.width + x] = static_cast<double>(occluded) / samples;
    }
  });
  return out;
}

OcclusionBuffer combine_ssao(const OcclusionBuffer& near, const OcclusionBuffer& far) {
  if (near.width != far.width || near.height != far.height || near.values.size() != far.values.size())
    throw InvalidArgument("occlusion buffers differ in size");
  OcclusionBuffer out{near.width, near.height, std::vector<double>(near.values.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = 1.0 - (1.0 - near.values[i]) * (1.0 - far.values[i]);
  return out;
}

Image composite(const ColorBuffer& color, const OcclusionBuffer& occlusion, double strength) {
  if (!occlusion.values.empty() &&
      (occlusion.width != color.width || occlusion.height != color.height || occlusion.values.size() != color.pixels.size()))
    throw InvalidArgument("occlusion buffer does not match the color buffer");
  Image img;
  img.width = color.width;
  img.height = color.height;
  img.rgb.resize(color.pixels.size() * 3);
  for (std::size_t i = 0; i < color.pixels.size(); ++i) {
    const double occ = occlusion.values.empty() ? 0.0 : occlusion.values[i];
    const double visibility = std::clamp(1.0 - strength * occ, 0.0, 1.0);
    for (int c = 0; c < 3; ++c) img.rgb[i * 3 + c] = to_byte(color.pixels[i][c] * visibility);
  }
  return img;
}

RenderResult render(const Scene& scene, const Camera& camera, const RenderSettings& settings, IntersectStats* stats) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  if (settings.ssao) settings.ssao->validate();
  RenderResult r;
  const auto t0 = clock::now();
  r.gbuffer = render_gbuffer(scene, camera, stats);
  const auto t1 = clock::now();
  const ColorBuffer color = shade_phong(r.gbuffer, camera, settings.light, settings.bin_colors, settings.background);
  const auto t2 = clock::now();
  double strength = 0.0;
  if (settings.ssao) {
    const SsaoSettings& s = *settings.ssao;
    const auto near = ssao_pass(r.gbuffer, camera, s.radius_near, s.samples_per_pixel, s.seed);
    const auto far = ssao_pass(r.gbuffer, camera, s.radius_far, s.samples_per_pixel, splitmix64(s.seed));
    r.occlusion = combine_ssao(near, far);
    strength = s.strength;
  }
  const auto t3 = clock::now();
  r.image = composite(color, r.occlusion, strength);
  const auto t4 = clock::now();
  r.timings = {seconds(t0, t1), seconds(t1, t2) + seconds(t3, t4), seconds(t2, t3), seconds(t0, t4)};
  return r;
}

ImageFormat parse_image_format(std::string_view s) {
  if (s == "ppm") return ImageFormat::ppm;
  if (s == "png") return ImageFormat::png;
  throw InvalidArgument("unknown image format '" + std::string(s) + "'");
}

ImageFormat image_format_for(std::string_view path) {
  return path.size() >= 4 && path.substr(path.size() - 4) == ".png" ? ImageFormat::png : ImageFormat::ppm;
}

std::string encode_ppm(const Image& image) {
  check_image(image);
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

Image decode_ppm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> long {
    skip_space();
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const auto v = text::parse_int(bytes.substr(start, pos - start));
    if (!v || *v <= 0 || *v > (1 << 24)) throw ParseError(0, "malformed PPM header");
    return static_cast<long>(*v);
  };
  if (bytes.substr(0, 2) != "P6") throw ParseError(0, "not a binary PPM (P6) file");
  pos = 2;
  Image img;
  img.width = static_cast<int>(number());
  img.height = static_cast<int>(number());
  if (number() != 255) throw ParseError(0, "only PPM maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) throw ParseError(0, "malformed PPM header");
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
  if (bytes.size() - pos != n) throw ParseError(0, "PPM pixel data has the wrong length");
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

std::string encode_png(const Image& image) {
  check_image(image);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("cannot initialise the PNG encoder");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y)
    png_write_row(png, const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(y) * image.width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(std::string_view bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
    throw ParseError(0, "not a PNG file");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("cannot initialise the PNG decoder");
  }
  struct Reader {
    std::string_view data;
    std::size_t pos = 0;
  } reader{bytes};
  Image img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(0, "corrupt PNG data");
  }
  png_set_read_fn(png, &reader, [](png_structp p, png_bytep out, png_size_t len) {
    auto* r = static_cast<Reader*>(png_get_io_ptr(p));
    if (r->data.size() - r->pos < len) png_error(p, "truncated");
    std::copy_n(r->data.data() + r->pos, len, reinterpret_cast<char*>(out));
    r->pos += len;
  });
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) rows[y] = img.rgb.data() + static_cast<std::size_t>(y) * img.width * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_image(const Image& image, const std::string& path, ImageFormat format) {
  text::write_file(path, format == ImageFormat::png ? encode_png(image) : encode_ppm(image));
}

Image read_image(const std::string& path) {
  const std::string bytes = text::read_file(path);
  return bytes.size() >= 2 && bytes.compare(0, 2, "P6") == 0 ? decode_ppm(bytes) : decode_png(bytes);
}

}  // namespace skein
