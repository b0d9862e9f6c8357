#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skein/color.hpp"
#include "skein/scene.hpp"

namespace skein {

struct Camera {
  Vec3 position{0, 0, 3};
  Vec3 target{0, 0, 0};
  Vec3 up{0, 1, 0};
  double vertical_fov = 45.0;  ///< degrees
  int width = 512;
  int height = 512;
  double near = 1e-3;
  double far = 1e3;

  /// Throws InvalidArgument when an invariant is broken (zero-area viewport included).
  void validate() const;

  Vec3 forward() const;
  Vec3 right() const;
  Vec3 true_up() const;

  /// Primary ray through the centre of pixel (px, py); row 0 is the top of the image.
  Ray primary_ray(int px, int py) const;
  Ray ray_through(double x, double y) const;

  struct Projection {
    double x = 0.0;  ///< continuous pixel coordinates; pixel (i, j) covers [i, i+1) x [j, j+1)
    double y = 0.0;
    double depth = 0.0;  ///< view-space depth along forward()
  };
  /// Empty when the point is not in front of the camera.
  std::optional<Projection> project(const Vec3& p) const;

  /// Looks at the centre of `box` from `direction` so the bounding sphere fits the view.
  static Camera framing(const Aabb& box, int width, int height, Vec3 direction = {0, 0, 1},
                        double vertical_fov = 45.0);
};

struct GSample {
  bool hit = false;
  HitKind kind = HitKind::surface;
  BinIndex bin_id = 0;
  double depth = 0.0;  ///< view-space depth, meaningful on hits
  Vec3 position;
  Vec3 normal;
};

struct GBuffer {
  int width = 0;
  int height = 0;
  std::vector<GSample> samples;  ///< row-major, row 0 at the top

  const GSample& at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
};

/// Worker count for per-row parallel passes: hardware concurrency, capped by the
/// SKEIN_THREADS environment variable when it holds a positive integer.
unsigned worker_count();

/// One ray per pixel centre; hits outside [camera.near, camera.far] in view depth are misses.
GBuffer render_gbuffer(const Scene& scene, const Camera& camera, IntersectStats* stats = nullptr);

struct Light {
  double ambient = 0.2;
  double diffuse = 0.7;
  double specular = 0.25;
  double shininess = 32.0;
};

/// Linear RGB in [0, 1], row-major.
struct ColorBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::array<double, 3>> pixels;
};

/// Headlight Phong: the light sits at the camera. `materials` holds one color per bin
/// (empty means white); miss pixels take `background`.
ColorBuffer shade_phong(const GBuffer& gbuffer, const Camera& camera, const Light& light,
                        std::span<const Rgb> materials, Rgb background = {255, 255, 255});

struct OcclusionBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> values;  ///< in [0, 1], 0 on miss pixels
};

struct SsaoSettings {
  double radius_near = 0.02;
  double radius_far = 0.25;
  int samples_per_pixel = 16;
  std::uint64_t seed = 1;
  double strength = 1.0;

  void validate() const;
};

/// Fraction of seeded sample points in a ball of `radius` around each hit point that lie
/// behind the depth buffer, counting only occluders within `radius` in depth of the point.
OcclusionBuffer ssao_pass(const GBuffer& gbuffer, const Camera& camera, double radius, int samples,
                          std::uint64_t seed);

/// 1 - (1 - near)(1 - far). Throws InvalidArgument on a size mismatch.
OcclusionBuffer combine_ssao(const OcclusionBuffer& near, const OcclusionBuffer& far);

/// 8-bit RGB image, row-major, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const Image&, const Image&) = default;
};

/// color x (1 - strength x occlusion), miss pixels keep their color. Empty occlusion
/// means none. Throws InvalidArgument on a size mismatch.
Image composite(const ColorBuffer& color, const OcclusionBuffer& occlusion, double strength = 1.0);

struct RenderSettings {
  Light light;
  Rgb background{255, 255, 255};
  std::optional<SsaoSettings> ssao;
  std::vector<Rgb> bin_colors;
};

struct RenderTimings {
  double gbuffer_s = 0.0;
  double shading_s = 0.0;
  double ssao_s = 0.0;
  double total_s = 0.0;
};

struct RenderResult {
  Image image;
  GBuffer gbuffer;
  OcclusionBuffer occlusion;
  RenderTimings timings;
};

RenderResult render(const Scene& scene, const Camera& camera, const RenderSettings& settings,
                    IntersectStats* stats = nullptr);

enum class ImageFormat { ppm, png };
ImageFormat parse_image_format(std::string_view s);
/// From the file extension; PPM unless it ends in ".png".
ImageFormat image_format_for(std::string_view path);

std::string encode_ppm(const Image& image);
Image decode_ppm(std::string_view bytes);
std::string encode_png(const Image& image);
Image decode_png(std::string_view bytes);

/// Throws IoError when the file cannot be written.
void write_image(const Image& image, const std::string& path, ImageFormat format);
Image read_image(const std::string& path);

}  // namespace skein
