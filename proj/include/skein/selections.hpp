#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skein/color.hpp"
#include "skein/model.hpp"
#include "skein/tracks.hpp"

namespace skein {

/// Fixed-length bitset over the bins of one model.
class BinSet {
 public:
  BinSet() = default;
  explicit BinSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}
  static BinSet from_range(std::size_t size, BinRange range);
  static BinSet from_indices(std::size_t size, std::span<const BinIndex> indices);

  std::size_t size() const { return size_; }
  bool test(BinIndex b) const { return b < size_ && ((words_[b / 64] >> (b % 64)) & 1U) != 0; }
  /// Throws OutOfRange for an index past the end.
  void set(BinIndex b, bool value = true);
  void reset(BinIndex b) { set(b, false); }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<BinIndex> indices() const;

  BinSet& operator|=(const BinSet& o);
  BinSet& operator&=(const BinSet& o);
  friend BinSet operator|(BinSet a, const BinSet& b) { return a |= b; }
  friend BinSet operator&(BinSet a, const BinSet& b) { return a &= b; }
  friend bool operator==(const BinSet&, const BinSet&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Selection {
  SelectionId id = 0;
  std::string name;
  BinSet bins;
  Rgb color;
  bool visible = true;
  bool clip_exempt = false;
  std::uint64_t order = 0;  ///< creation index; larger is newer

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Selections over one model, kept in creation order.
class SelectionSet {
 public:
  explicit SelectionSet(std::size_t bin_count = 0) : bin_count_(bin_count) {}

  std::size_t bin_count() const { return bin_count_; }
  std::span<const Selection> selections() const { return selections_; }
  std::size_t size() const { return selections_.size(); }

  /// Appends a selection with a fresh id and order. Without a color, one is derived from
  /// `seed` and the creation index. Throws InvalidArgument on a length mismatch.
  SelectionId add(std::string name, BinSet bins, std::optional<Rgb> color = std::nullopt,
                  std::string_view seed = "skein");
  /// Re-inserts a stored selection keeping its id and order (for loading sessions).
  /// Throws InvalidArgument on a duplicate id or an order that is not increasing.
  void restore(Selection selection);
  /// Throws InvalidArgument for an unknown id.
  void remove(SelectionId id);
  const Selection& get(SelectionId id) const;
  Selection& get(SelectionId id);
  bool contains(SelectionId id) const;

  SelectionId next_id() const { return next_id_; }
  std::uint64_t next_order() const { return next_order_; }

  friend bool operator==(const SelectionSet&, const SelectionSet&) = default;

 private:
  std::size_t bin_count_ = 0;
  std::vector<Selection> selections_;
  SelectionId next_id_ = 1;
  std::uint64_t next_order_ = 0;
};

enum class PointMode { add, remove };

/// Adds (idempotent) or removes one bin. Throws OutOfRange for a bin past the end.
BinSet select_point(BinSet bins, BinIndex bin, PointMode mode = PointMode::add);

/// Bins with |p - center| <= radius. Throws InvalidArgument when radius <= 0.
BinSet select_sphere(const ChromatinModel& model, const Vec3& center, double radius);
BinSet select_sphere(const ChromatinModel& model, BinIndex center, double radius);

/// Inclusive index range between two bins in either order; may cross part boundaries.
/// Throws OutOfRange for a bin past the end.
BinRange select_sequence(BinIndex a, BinIndex b, std::size_t bin_count);

struct BinAppearance {
  Rgb color = kNeutralGray;
  double radius_scale = 1.0;

  friend bool operator==(const BinAppearance&, const BinAppearance&) = default;
};

/// Marker (the last listed marker wins) > newest visible selection holding the bin >
/// base annotation color > neutral gray.
BinAppearance resolve_bin_color(BinIndex bin, std::optional<Rgb> base, const SelectionSet& selections,
                                std::span<const Marker> markers);

/// resolve_bin_color for every bin; `base` is empty or holds one entry per bin.
std::vector<BinAppearance> resolve_all(const SelectionSet& selections, std::span<const std::optional<Rgb>> base,
                                       std::span<const Marker> markers);

/// A bin is visible unless a hidden selection, a hidden segment or a segment of a hidden
/// track contains it.
BinSet visible_bins(const SelectionSet& selections, std::span<const SegmentationTrack> segmentations);

/// One record per maximal run of bins inside a part, named after the selection.
std::vector<BedRecord> selection_to_bed(const Selection& selection, const ChromatinModel& model);

/// Bins overlapped by any record; unknown chromosomes and misses are counted in `skipped`.
BinSet bins_from_bed(std::span<const BedRecord> records, const ChromatinModel& model, std::size_t* skipped = nullptr);

}  // namespace skein
