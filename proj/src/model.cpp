#include "skein/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "skein/error.hpp"
#include "skein/text.hpp"

namespace skein {

namespace {

constexpr const char* kImplicitPart = "all";

std::vector<Part> validated_parts(std::vector<Part> parts, std::size_t n) {
  if (parts.empty()) return {Part{kImplicitPart, {0, n - 1}, 0}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.bins.first > p.bins.last || p.bins.last >= n)
      throw InvalidArgument("part '" + p.name + "' has an invalid bin range");
    if (i > 0 && p.bins.first <= parts[i - 1].bins.last)
      throw InvalidArgument("part '" + p.name + "' overlaps or precedes the previous part");
    if (p.offset_bp < 0) throw InvalidArgument("part '" + p.name + "' has a negative offset");
    for (std::size_t j = 0; j < i; ++j)
      if (parts[j].name == p.name) throw InvalidArgument("duplicate part name '" + p.name + "'");
  }
  return parts;
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

ChromatinModel::ChromatinModel(std::string name, std::vector<Vec3> bins, std::vector<Part> parts,
                               std::int64_t resolution_bp)
    : name_(std::move(name)), bins_(std::move(bins)), resolution_bp_(resolution_bp) {
  if (bins_.empty()) throw InvalidArgument("empty model");
  if (resolution_bp_ < 1) throw InvalidArgument("resolution must be at least 1 bp");
  for (std::size_t i = 0; i < bins_.size(); ++i)
    if (!is_finite(bins_[i]))
      throw InvalidArgument("bin " + std::to_string(i) + " has a non-finite coordinate");
  parts_ = validated_parts(std::move(parts), bins_.size());
}

std::size_t ChromatinModel::part_of(BinIndex bin) const {
  auto it = std::upper_bound(parts_.begin(), parts_.end(), bin,
                             [](BinIndex b, const Part& p) { return b < p.bins.first; });
  if (it == parts_.begin()) return parts_.size();
  --it;
  return it->bins.contains(bin) ? static_cast<std::size_t>(it - parts_.begin()) : parts_.size();
}

std::size_t ChromatinModel::find_part(std::string_view name) const {
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].name == name) return i;
  throw InvalidArgument("unknown part '" + std::string(name) + "'");
}

ChromatinModel ChromatinModel::with_resolution(std::int64_t resolution_bp) const {
  return ChromatinModel(name_, bins_, parts_, resolution_bp);
}

ChromatinModel ChromatinModel::with_bins(std::vector<Vec3> bins) const {
  if (bins.size() != bins_.size()) throw InvalidArgument("bin count mismatch");
  return ChromatinModel(name_, std::move(bins), parts_, resolution_bp_);
}

std::uint64_t ChromatinModel::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : bins_) {
    const std::uint64_t c[3] = {std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y),
                                std::bit_cast<std::uint64_t>(p.z)};
    hash_bytes(h, c, sizeof c);
  }
  for (const auto& p : parts_) {
    hash_bytes(h, p.name.data(), p.name.size());
    const std::uint64_t r[3] = {p.bins.first, p.bins.last, static_cast<std::uint64_t>(p.offset_bp)};
    hash_bytes(h, r, sizeof r);
  }
  hash_bytes(h, &resolution_bp_, sizeof resolution_bp_);
  return h;
}

ChromatinModel parse_model(std::string_view textv, std::string name, std::int64_t resolution_bp) {
  std::vector<Vec3> bins;
  std::vector<Part> parts;
  int columns = 0;

  text::for_each_line(textv, [&](std::size_t line_no, std::string_view line) {
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') return;
    const auto fields = text::split_any(body, " \t,");
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(line_no, "expected 'part x y z' or 'x y z', got " +
                                    std::to_string(fields.size()) + " fields");
    const int cols = static_cast<int>(fields.size());
    if (columns == 0) columns = cols;
    if (cols != columns) throw ParseError(line_no, "inconsistent column count");

    const std::size_t off = cols == 4 ? 1 : 0;
    Vec3 p;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto v = text::parse_double(fields[off + k]);
      if (!v) throw ParseError(line_no, "invalid coordinate '" + std::string(fields[off + k]) + "'");
      if (!std::isfinite(*v)) throw ParseError(line_no, "non-finite coordinate");
      p[k] = *v;
    }

    const BinIndex index = bins.size();
    bins.push_back(p);
    if (cols == 4) {
      const std::string_view part = fields[0];
      if (!parts.empty() && parts.back().name == part) {
        parts.back().bins.last = index;
      } else {
        for (const auto& prev : parts)
          if (prev.name == part)
            throw ParseError(line_no, "bins of part '" + std::string(part) + "' are not contiguous");
        parts.push_back(Part{std::string(part), {index, index}, 0});
      }
    }
  });

  if (bins.empty()) throw ParseError(0, "empty model");
  try {
    return ChromatinModel(std::move(name), std::move(bins), std::move(parts), resolution_bp);
  } catch (const InvalidArgument& e) {
    throw ParseError(0, e.what());
  }
}

ChromatinModel load_model(const std::string& path, std::int64_t resolution_bp) {
  auto name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name.erase(0, slash + 1);
  return parse_model(text::read_file(path), name, resolution_bp);
}

std::string serialize_model(const ChromatinModel& model) {
  std::string out;
  out.reserve(model.size() * 48);
  for (const auto& part : model.parts()) {
    for (BinIndex i = part.bins.first; i <= part.bins.last; ++i) {
      const auto& p = model.bin(i);
      out += part.name;
      for (double c : {p.x, p.y, p.z}) {
        out += ' ';
        out += text::format_double(c);
      }
      out += '\n';
    }
  }
  return out;
}

ChromatinModel normalize_model(const ChromatinModel& model) {
  Vec3 centroid;
  for (const auto& p : model.bins()) centroid += p;
  centroid /= static_cast<double>(model.size());

  double radius = 0.0;
  for (const auto& p : model.bins()) radius = std::max(radius, distance(p, centroid));
  if (!(radius > 0.0)) throw InvalidArgument("cannot normalize a model with zero extent");

  std::vector<Vec3> bins;
  bins.reserve(model.size());
  for (const auto& p : model.bins()) bins.push_back((p - centroid) / radius);
  return model.with_bins(std::move(bins));
}

BinLookup genomic_to_bins(const ChromatinModel& model, const GenomicInterval& interval) {
  if (interval.start_bp < 0 || interval.end_bp <= interval.start_bp)
    throw InvalidArgument("invalid genomic interval");
  const auto& part = model.parts()[model.find_part(interval.part)];
  const std::int64_t res = model.resolution_bp();
  const auto count = static_cast<std::int64_t>(part.bins.size());

  const std::int64_t rel_start = interval.start_bp - part.offset_bp;
  const std::int64_t rel_end = interval.end_bp - part.offset_bp;
  if (rel_end <= 0 || rel_start >= count * res)
    throw OutOfRange("interval " + interval.part + ":" + std::to_string(interval.start_bp) + "-" +
                     std::to_string(interval.end_bp) + " lies outside the part's bins");

  // Floor division; rel_start may be negative.
  std::int64_t first = rel_start >= 0 ? rel_start / res : -((-rel_start + res - 1) / res);
  std::int64_t last = (rel_end - 1) / res;
  BinLookup out;
  if (first < 0) {
    first = 0;
    out.clamped = true;
  }
  if (last >= count) {
    last = count - 1;
    out.clamped = true;
  }
  out.range = {part.bins.first + static_cast<BinIndex>(first), part.bins.first + static_cast<BinIndex>(last)};
  return out;
}

GenomicInterval bin_to_genomic(const ChromatinModel& model, BinIndex bin) {
  if (bin >= model.size())
    throw OutOfRange("bin " + std::to_string(bin) + " out of range (model has " +
                     std::to_string(model.size()) + " bins)");
  const auto pi = model.part_of(bin);
  if (pi == model.parts().size()) throw OutOfRange("bin " + std::to_string(bin) + " is in no part");
  const auto& part = model.parts()[pi];
  const auto local = static_cast<std::int64_t>(bin - part.bins.first);
  const std::int64_t res = model.resolution_bp();
  return {part.name, part.offset_bp + local * res, part.offset_bp + (local + 1) * res};
}

std::vector<double> inter_bin_spacings(const ChromatinModel& model) {
  if (model.size() < 2) throw InvalidArgument("spacings need at least two bins");
  std::vector<double> out;
  out.reserve(model.size() - 1);
  for (const auto& part : model.parts())
    for (BinIndex i = part.bins.first; i < part.bins.last; ++i)
      out.push_back(distance(model.bin(i), model.bin(i + 1)));
  return out;
}

std::int64_t bins_for_length(std::int64_t length_bp, std::int64_t resolution_bp) {
  if (resolution_bp < 1) throw InvalidArgument("resolution must be at least 1 bp");
  if (length_bp < 0) throw InvalidArgument("negative length");
  return (length_bp + resolution_bp - 1) / resolution_bp;
}

std::int64_t bins_for_genome(std::span<const PartLength> parts, std::int64_t resolution_bp) {
  std::int64_t total = 0;
  for (const auto& p : parts) total += bins_for_length(p.length_bp, resolution_bp);
  return total;
}

}  // namespace skein
