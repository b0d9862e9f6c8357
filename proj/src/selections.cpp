#include "skein/selections.hpp"

#include <algorithm>
#include <bit>

#include "skein/error.hpp"

namespace skein {

BinSet BinSet::from_range(std::size_t size, BinRange range) {
  BinSet s(size);
  if (range.first > range.last || range.last >= size) throw OutOfRange("bin range past the end of the model");
  for (BinIndex b = range.first; b <= range.last; ++b) s.set(b);
  return s;
}

BinSet BinSet::from_indices(std::size_t size, std::span<const BinIndex> indices) {
  BinSet s(size);
  for (BinIndex b : indices) s.set(b);
  return s;
}

void BinSet::set(BinIndex b, bool value) {
  if (b >= size_) throw OutOfRange("bin " + std::to_string(b) + " out of range (" + std::to_string(size_) + " bins)");
  const std::uint64_t bit = std::uint64_t{1} << (b % 64);
  if (value) words_[b / 64] |= bit;
  else words_[b / 64] &= ~bit;
}

std::size_t BinSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<BinIndex> BinSet::indices() const {
  std::vector<BinIndex> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word != 0) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

BinSet& BinSet::operator|=(const BinSet& o) {
  if (o.size_ != size_) throw InvalidArgument("bin sets differ in length");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

BinSet& BinSet::operator&=(const BinSet& o) {
  if (o.size_ != size_) throw InvalidArgument("bin sets differ in length");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

SelectionId SelectionSet::add(std::string name, BinSet bins, std::optional<Rgb> color, std::string_view seed) {
  if (bins.size() != bin_count_) throw InvalidArgument("selection length does not match the model");
  Selection s;
  s.id = next_id_;
  s.name = std::move(name);
  s.bins = std::move(bins);
  s.order = next_order_;
  s.color = color ? *color : seeded_color(seed, static_cast<std::size_t>(s.order));
  selections_.push_back(std::move(s));
  ++next_id_;
  ++next_order_;
  return selections_.back().id;
}

void SelectionSet::restore(Selection selection) {
  if (selection.bins.size() != bin_count_) throw InvalidArgument("selection length does not match the model");
  if (contains(selection.id)) throw InvalidArgument("duplicate selection id " + std::to_string(selection.id));
  if (!selections_.empty() && selection.order <= selections_.back().order)
    throw InvalidArgument("selection order must increase");
  next_id_ = std::max<SelectionId>(next_id_, selection.id + 1);
  next_order_ = std::max(next_order_, selection.order + 1);
  selections_.push_back(std::move(selection));
}

void SelectionSet::remove(SelectionId id) {
  const auto it = std::find_if(selections_.begin(), selections_.end(), [&](const Selection& s) { return s.id == id; });
  if (it == selections_.end()) throw InvalidArgument("unknown selection id " + std::to_string(id));
  selections_.erase(it);
}

const Selection& SelectionSet::get(SelectionId id) const {
  for (const auto& s : selections_)
    if (s.id == id) return s;
  throw InvalidArgument("unknown selection id " + std::to_string(id));
}

Selection& SelectionSet::get(SelectionId id) {
  return const_cast<Selection&>(static_cast<const SelectionSet&>(*this).get(id));
}

bool SelectionSet::contains(SelectionId id) const {
  return std::any_of(selections_.begin(), selections_.end(), [&](const Selection& s) { return s.id == id; });
}

BinSet select_point(BinSet bins, BinIndex bin, PointMode mode) {
  bins.set(bin, mode == PointMode::add);
  return bins;
}

BinSet select_sphere(const ChromatinModel& model, const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("selection radius must be positive");
  BinSet out(model.size());
  const double r2 = radius * radius;
  for (BinIndex i = 0; i < model.size(); ++i)
    if (length_squared(model.bin(i) - center) <= r2) out.set(i);
  return out;
}

BinSet select_sphere(const ChromatinModel& model, BinIndex center, double radius) {
  if (center >= model.size()) throw OutOfRange("centre bin out of range");
  BinSet out = select_sphere(model, model.bin(center), radius);
  out.set(center);
  return out;
}

BinRange select_sequence(BinIndex a, BinIndex b, std::size_t bin_count) {
  if (a >= bin_count || b >= bin_count) throw OutOfRange("sequence end out of range");
  return {std::min(a, b), std::max(a, b)};
}

BinAppearance resolve_bin_color(BinIndex bin, std::optional<Rgb> base, const SelectionSet& selections,
                                std::span<const Marker> markers) {
  for (auto it = markers.rbegin(); it != markers.rend(); ++it)
    if (it->locus.contains(bin)) return {it->color, it->radius_scale};
  const Selection* newest = nullptr;
  for (const auto& s : selections.selections())
    if (s.visible && s.bins.test(bin) && (!newest || s.order > newest->order)) newest = &s;
  if (newest) return {newest->color, 1.0};
  return {base.value_or(kNeutralGray), 1.0};
}

std::vector<BinAppearance> resolve_all(const SelectionSet& selections, std::span<const std::optional<Rgb>> base,
                                       std::span<const Marker> markers) {
  const std::size_t n = selections.bin_count();
  if (!base.empty() && base.size() != n) throw InvalidArgument("base colors do not match the bin count");
  std::vector<BinAppearance> out(n);
  for (BinIndex b = 0; b < n; ++b)
    out[b] = resolve_bin_color(b, base.empty() ? std::nullopt : base[b], selections, markers);
  return out;
}

BinSet visible_bins(const SelectionSet& selections, std::span<const SegmentationTrack> segmentations) {
  const std::size_t n = selections.bin_count();
  BinSet hidden(n);
  for (const auto& s : selections.selections())
    if (!s.visible) hidden |= s.bins;
  for (const auto& track : segmentations)
    for (const auto& seg : track.segments) {
      if (track.visible && seg.visible) continue;
      if (seg.bins.last >= n) throw OutOfRange("segment past the end of the model");
      for (BinIndex b = seg.bins.first; b <= seg.bins.last; ++b) hidden.set(b);
    }
  BinSet out(n);
  for (BinIndex b = 0; b < n; ++b)
    if (!hidden.test(b)) out.set(b);
  return out;
}

std::vector<BedRecord> selection_to_bed(const Selection& selection, const ChromatinModel& model) {
  if (selection.bins.size() != model.size()) throw InvalidArgument("selection length does not match the model");
  std::vector<BedRecord> out;
  for (const auto& part : model.parts()) {
    BinIndex b = part.bins.first;
    while (b <= part.bins.last) {
      if (!selection.bins.test(b)) {
        ++b;
        continue;
      }
      const BinIndex first = b;
      while (b + 1 <= part.bins.last && selection.bins.test(b + 1)) ++b;
      BedRecord r;
      r.chrom = part.name;
      r.start_bp = bin_to_genomic(model, first).start_bp;
      r.end_bp = bin_to_genomic(model, b).end_bp;
      r.name = selection.name;
      out.push_back(std::move(r));
      ++b;
    }
  }
  return out;
}

BinSet bins_from_bed(std::span<const BedRecord> records, const ChromatinModel& model, std::size_t* skipped) {
  BinSet out(model.size());
  std::size_t missed = 0;
  for (const auto& r : records) {
    try {
      const auto lookup = genomic_to_bins(model, {r.chrom, r.start_bp, r.end_bp});
      for (BinIndex b = lookup.range.first; b <= lookup.range.last; ++b) out.set(b);
    } catch (const InvalidArgument&) {
      ++missed;
    } catch (const OutOfRange&) {
      ++missed;
    }
  }
  if (skipped) *skipped = missed;
  return out;
}

}  // namespace skein
