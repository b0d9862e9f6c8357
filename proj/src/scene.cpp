#include "skein/scene.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "skein/error.hpp"

namespace skein {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper bound on grid cells per primitive; keeps memory linear in scene size.
constexpr double kMaxCellsPerPrimitive = 32.0;

std::atomic<std::uint64_t> next_scene_id{1};

double max_radius(const Shape& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sphere>) return v.radius;
        else if constexpr (std::is_same_v<T, RoundedCone>) return std::max(v.r0, v.r1);
        else return v.radius;
      },
      s);
}

/// Per-thread "already tested for this ray" stamps, so primitives spanning several cells
/// are intersected once.
struct Mailbox {
  std::uint64_t scene = 0;
  std::uint64_t ray = 0;
  std::vector<std::uint64_t> stamps;
};

thread_local Mailbox mailbox;

bool closer(const Hit& h, std::uint32_t prim, const std::optional<Hit>& best, std::uint32_t best_prim) {
  if (!best) return true;
  return h.t < best->t || (h.t == best->t && prim < best_prim);
}

}  // namespace

Scene::Scene(SceneDescription description) : desc_(std::move(description)), id_(next_scene_id++) {
  if (desc_.planes.size() > kMaxCuttingPlanes) throw InvalidArgument("too many cutting planes");
  if (!desc_.visible.empty() && desc_.visible.size() != desc_.bin_count)
    throw InvalidArgument("visibility length does not match the bin count");
  if (!desc_.plane_masks.empty() && desc_.plane_masks.size() != desc_.bin_count)
    throw InvalidArgument("plane mask length does not match the bin count");
  for (const auto& p : desc_.primitives)
    if (p.bin_id >= desc_.bin_count) throw InvalidArgument("primitive refers to an unknown bin");
  for (const auto& pl : desc_.planes)
    if (std::abs(length(pl.normal) - 1.0) > 1e-9) throw InvalidArgument("cutting plane normal must be unit length");
  all_planes_ = desc_.planes.size() == 64 ? ~0ULL : ((1ULL << desc_.planes.size()) - 1);

  const std::size_t n = desc_.primitives.size();
  if (n >= std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("too many primitives");
  prim_bounds_.reserve(n);
  double largest = 0.0;
  for (const auto& p : desc_.primitives) {
    prim_bounds_.push_back(skein::bounds(p.shape));
    bounds_.expand(prim_bounds_.back());
    largest = std::max(largest, max_radius(p.shape));
  }
  if (n == 0) return;

  const Vec3 extent = bounds_.hi - bounds_.lo;
  cell_ = desc_.cell_size > 0.0 ? desc_.cell_size : 2.0 * largest;
  const double max_cells = std::max(1.0, kMaxCellsPerPrimitive * static_cast<double>(n));
  auto cells_for = [&](double c) {
    double total = 1.0;
    for (int k = 0; k < 3; ++k) total *= std::max(1.0, std::ceil(extent[k] / c));
    return total;
  };
  if (!(cell_ > 0.0)) cell_ = std::max({extent.x, extent.y, extent.z, 1e-12});
  while (cells_for(cell_) > max_cells) cell_ *= 1.25;
  for (int k = 0; k < 3; ++k) dims_[k] = static_cast<int>(std::max(1.0, std::ceil(extent[k] / cell_)));

  const std::size_t cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  auto cell_range = [&](const Aabb& b, std::array<int, 3>& lo, std::array<int, 3>& hi) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::clamp(static_cast<int>(std::floor((b.lo[k] - bounds_.lo[k]) / cell_)), 0, dims_[k] - 1);
      hi[k] = std::clamp(static_cast<int>(std::floor((b.hi[k] - bounds_.lo[k]) / cell_)), 0, dims_[k] - 1);
    }
  };
  auto cell_index = [&](int x, int y, int z) {
    return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x;
  };

  cell_start_.assign(cells + 1, 0);
  std::array<int, 3> lo{}, hi{};
  for (std::size_t i = 0; i < n; ++i) {
    cell_range(prim_bounds_[i], lo, hi);
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) ++cell_start_[cell_index(x, y, z) + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.resize(cell_start_[cells]);
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    cell_range(prim_bounds_[i], lo, hi);
    for (int z = lo[2]; z <= hi[2]; ++z)
      for (int y = lo[1]; y <= hi[1]; ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) cell_items_[fill[cell_index(x, y, z)]++] = static_cast<std::uint32_t>(i);
  }
}

std::optional<Hit> Scene::test(const Ray& ray, std::uint32_t prim, IntersectStats* stats) const {
  const auto& p = desc_.primitives[prim];
  if (!bin_visible(p.bin_id)) return std::nullopt;
  return clip_hit_masked(ray, p, desc_.planes, plane_mask(p.bin_id), stats);
}

std::optional<Hit> Scene::trace_brute_force(const Ray& ray, IntersectStats* stats) const {
  std::optional<Hit> best;
  std::uint32_t best_prim = 0;
  for (std::uint32_t i = 0; i < desc_.primitives.size(); ++i) {
    const auto h = test(ray, i, stats);
    if (h && closer(*h, i, best, best_prim)) {
      best = h;
      best_prim = i;
    }
  }
  return best;
}

std::optional<Hit> Scene::trace(const Ray& ray, IntersectStats* stats) const {
  if (desc_.primitives.empty()) return std::nullopt;

  // Clip the ray against the grid box.
  double t_near = 0.0;
  double t_far = kInf;
  for (int k = 0; k < 3; ++k) {
    const double o = ray.origin[k];
    const double d = ray.direction[k];
    if (d == 0.0) {
      if (o < bounds_.lo[k] || o > bounds_.hi[k]) return std::nullopt;
      continue;
    }
    double ta = (bounds_.lo[k] - o) / d;
    double tb = (bounds_.hi[k] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t_near = std::max(t_near, ta);
    t_far = std::min(t_far, tb);
  }
  if (t_near > t_far) return std::nullopt;

  if (mailbox.scene != id_) {
    mailbox.scene = id_;
    mailbox.ray = 0;
    mailbox.stamps.assign(desc_.primitives.size(), 0);
  }
  const std::uint64_t stamp = ++mailbox.ray;

  const Vec3 entry = ray.at(t_near);
  std::array<int, 3> cell{}, step{};
  std::array<double, 3> t_max{}, t_delta{};
  for (int k = 0; k < 3; ++k) {
    cell[k] = std::clamp(static_cast<int>(std::floor((entry[k] - bounds_.lo[k]) / cell_)), 0, dims_[k] - 1);
    const double d = ray.direction[k];
    if (d > 0.0) {
      step[k] = 1;
      t_max[k] = (bounds_.lo[k] + (cell[k] + 1) * cell_ - ray.origin[k]) / d;
      t_delta[k] = cell_ / d;
    } else if (d < 0.0) {
      step[k] = -1;
      t_max[k] = (bounds_.lo[k] + cell[k] * cell_ - ray.origin[k]) / d;
      t_delta[k] = -cell_ / d;
    } else {
      step[k] = 0;
      t_max[k] = kInf;
      t_delta[k] = kInf;
    }
  }

  std::optional<Hit> best;
  std::uint32_t best_prim = 0;
  while (true) {
    const std::size_t ci = (static_cast<std::size_t>(cell[2]) * dims_[1] + cell[1]) * dims_[0] + cell[0];
    for (std::uint32_t k = cell_start_[ci]; k < cell_start_[ci + 1]; ++k) {
      const std::uint32_t prim = cell_items_[k];
      if (mailbox.stamps[prim] == stamp) continue;
      mailbox.stamps[prim] = stamp;
      const auto h = test(ray, prim, stats);
      if (h && closer(*h, prim, best, best_prim)) {
        best = h;
        best_prim = prim;
      }
    }
    const int axis = t_max[0] < t_max[1] ? (t_max[0] < t_max[2] ? 0 : 2) : (t_max[1] < t_max[2] ? 1 : 2);
    const double cell_exit = t_max[axis];
    // A hit inside the current cell cannot be beaten by primitives first met later, except
    // for exact ties, which are resolved by primitive index.
    if (best && best->t < cell_exit) break;
    if (cell_exit > t_far) break;
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[axis] >= dims_[axis]) break;
    t_max[axis] += t_delta[axis];
  }
  return best;
}

std::optional<BinIndex> Scene::pick(const Ray& ray) const {
  const auto h = trace(ray);
  if (!h) return std::nullopt;
  return h->bin_id;
}

}  // namespace skein
