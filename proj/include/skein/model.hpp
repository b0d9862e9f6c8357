#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skein/vec3.hpp"

namespace skein {

using BinIndex = std::size_t;
using SelectionId = std::uint32_t;

/// Inclusive range of bin indices.
struct BinRange {
  BinIndex first = 0;
  BinIndex last = 0;

  std::size_t size() const { return last - first + 1; }
  bool contains(BinIndex b) const { return b >= first && b <= last; }
  friend bool operator==(const BinRange&, const BinRange&) = default;
};

/// Half-open genomic interval [start_bp, end_bp) on a named part (chromosome).
struct GenomicInterval {
  std::string part;
  std::int64_t start_bp = 0;
  std::int64_t end_bp = 0;

  friend bool operator==(const GenomicInterval&, const GenomicInterval&) = default;
};

/// A contiguous run of bins belonging to one chromosome (or chromosome copy).
struct Part {
  std::string name;
  BinRange bins;
  std::int64_t offset_bp = 0;  ///< genomic coordinate of the part's first bin

  friend bool operator==(const Part&, const Part&) = default;
};

/// Ordered 3D bin positions of one chromatin structure. Immutable once built;
/// the constructor enforces every invariant.
class ChromatinModel {
 public:
  /// Throws InvalidArgument on an empty bin list, non-finite coordinates,
  /// overlapping or unordered parts, or a zero resolution. An empty `parts`
  /// list means one implicit part named "all" covering every bin.
  ChromatinModel(std::string name, std::vector<Vec3> bins, std::vector<Part> parts,
                 std::int64_t resolution_bp = 1);

  const std::string& name() const { return name_; }
  std::span<const Vec3> bins() const { return bins_; }
  const Vec3& bin(BinIndex i) const { return bins_[i]; }
  std::size_t size() const { return bins_.size(); }
  std::span<const Part> parts() const { return parts_; }
  std::int64_t resolution_bp() const { return resolution_bp_; }

  /// Index of the part holding `bin`, or parts().size() when the bin is in no part.
  std::size_t part_of(BinIndex bin) const;
  /// Index of the part named `name`; throws InvalidArgument when unknown.
  std::size_t find_part(std::string_view name) const;

  /// Same structure, different resolution / name.
  ChromatinModel with_resolution(std::int64_t resolution_bp) const;
  ChromatinModel with_bins(std::vector<Vec3> bins) const;

  /// 64-bit FNV-1a over positions, parts and resolution.
  std::uint64_t content_hash() const;

  friend bool operator==(const ChromatinModel&, const ChromatinModel&) = default;

 private:
  std::string name_;
  std::vector<Vec3> bins_;
  std::vector<Part> parts_;
  std::int64_t resolution_bp_;
};

/// Parses the whitespace/comma separated `part x y z` format (part column optional).
/// Throws ParseError with the offending line number.
ChromatinModel parse_model(std::string_view text, std::string name = "model",
                           std::int64_t resolution_bp = 1);
ChromatinModel load_model(const std::string& path, std::int64_t resolution_bp = 1);

/// Canonical text form: one `part x y z` line per bin, numbers in shortest round-trip form.
std::string serialize_model(const ChromatinModel& model);

/// Translates the centroid to the origin and scales so the farthest bin lies at distance 1.
ChromatinModel normalize_model(const ChromatinModel& model);

struct BinLookup {
  BinRange range;
  bool clamped = false;  ///< the interval extended past the part's bins
};

/// Bins whose genomic span overlaps `interval`. Throws InvalidArgument for an
/// unknown part and OutOfRange when the interval misses the part entirely.
BinLookup genomic_to_bins(const ChromatinModel& model, const GenomicInterval& interval);

/// Genomic span of one bin. Throws OutOfRange for an invalid index.
GenomicInterval bin_to_genomic(const ChromatinModel& model, BinIndex bin);

/// Euclidean distances between consecutive bins of the same part.
std::vector<double> inter_bin_spacings(const ChromatinModel& model);

/// Number of bins needed to tile `length_bp` basepairs.
std::int64_t bins_for_length(std::int64_t length_bp, std::int64_t resolution_bp);

struct PartLength {
  std::string name;
  std::int64_t length_bp = 0;
};

/// Total bin count over a set of chromosomes, each tiled independently.
std::int64_t bins_for_genome(std::span<const PartLength> parts, std::int64_t resolution_bp);

}  // namespace skein
