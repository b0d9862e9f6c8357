#include "skein/tracks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "skein/error.hpp"
#include "skein/text.hpp"

namespace skein {

namespace {

bool is_header(std::string_view line) {
  return line.empty() || line.front() == '#' || line.starts_with("track") || line.starts_with("browser");
}

/// Bins of `model` overlapped by the record, or nullopt when the record falls outside the model.
std::optional<BinRange> record_bins(const BedRecord& rec, const ChromatinModel& model) {
  const auto parts = model.parts();
  const bool known = std::any_of(parts.begin(), parts.end(), [&](const Part& p) { return p.name == rec.chrom; });
  if (!known) return std::nullopt;
  try {
    return genomic_to_bins(model, {rec.chrom, rec.start_bp, rec.end_bp}).range;
  } catch (const OutOfRange&) {
    return std::nullopt;
  }
}

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BedRecord> parse_bed(std::string_view textv) {
  std::vector<BedRecord> out;
  text::for_each_line(textv, [&](std::size_t line_no, std::string_view line) {
    if (is_header(line)) return;
    const auto f = text::split_exact(line, '\t');
    if (f.size() < 3) throw ParseError(line_no, "BED needs at least 3 tab-separated columns");
    BedRecord rec;
    rec.chrom = std::string(f[0]);
    if (rec.chrom.empty()) throw ParseError(line_no, "empty chromosome name");
    const auto start = text::parse_int(f[1]);
    const auto end = text::parse_int(f[2]);
    if (!start || !end) throw ParseError(line_no, "non-integer coordinate");
    if (*start < 0) throw ParseError(line_no, "negative start");
    if (*end <= *start) throw ParseError(line_no, "end must be greater than start");
    rec.start_bp = *start;
    rec.end_bp = *end;
    if (f.size() > 3) rec.name = std::string(f[3]);
    if (f.size() > 4) {
      rec.score_text = std::string(f[4]);
      if (rec.score_text != ".") {
        const auto s = text::parse_double(rec.score_text);
        if (!s || !std::isfinite(*s)) throw ParseError(line_no, "non-numeric score '" + rec.score_text + "'");
        rec.score = *s;
      }
    }
    for (std::size_t i = 5; i < f.size(); ++i) rec.extra.emplace_back(f[i]);
    out.push_back(std::move(rec));
  });
  return out;
}

std::vector<BedRecord> load_bed(const std::string& path) { return parse_bed(text::read_file(path)); }

std::string serialize_bed(std::span<const BedRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.chrom;
    out += '\t';
    out += std::to_string(r.start_bp);
    out += '\t';
    out += std::to_string(r.end_bp);
    const bool has_score = !r.score_text.empty() || r.score.has_value();
    if (r.name || has_score || !r.extra.empty()) {
      out += '\t';
      out += r.name.value_or(".");
    }
    if (has_score || !r.extra.empty()) {
      out += '\t';
      if (!r.score_text.empty())
        out += r.score_text;
      else
        out += r.score ? text::format_double(*r.score) : ".";
    }
    for (const auto& e : r.extra) {
      out += '\t';
      out += e;
    }
    out += '\n';
  }
  return out;
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "min") return Aggregation::min;
  if (s == "max") return Aggregation::max;
  if (s == "average" || s == "mean") return Aggregation::average;
  if (s == "median") return Aggregation::median;
  throw InvalidArgument("unknown aggregation '" + std::string(s) + "'");
}

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::min: return "min";
    case Aggregation::max: return "max";
    case Aggregation::average: return "average";
    case Aggregation::median: return "median";
  }
  return "average";
}

AggregateResult aggregate_signal(std::span<const BedRecord> records, const ChromatinModel& model,
                                 Aggregation method, std::string name) {
  std::vector<std::vector<double>> per_bin(model.size());
  AggregateResult result;
  for (const auto& rec : records) {
    const auto range = record_bins(rec, model);
    if (!range) {
      ++result.skipped_records;
      continue;
    }
    if (!rec.score) continue;
    for (BinIndex b = range->first; b <= range->last; ++b) per_bin[b].push_back(*rec.score);
  }

  auto& track = result.track;
  track.name = std::move(name);
  track.aggregation = method;
  track.per_bin_values.resize(model.size());
  for (std::size_t b = 0; b < per_bin.size(); ++b) {
    auto& v = per_bin[b];
    if (v.empty()) continue;
    double value = 0.0;
    switch (method) {
      case Aggregation::min: value = *std::min_element(v.begin(), v.end()); break;
      case Aggregation::max: value = *std::max_element(v.begin(), v.end()); break;
      case Aggregation::average: {
        double sum = 0.0;
        for (double x : v) sum += x;
        value = sum / static_cast<double>(v.size());
        break;
      }
      case Aggregation::median: value = median_of(v); break;
    }
    track.per_bin_values[b] = value;
  }
  return result;
}

std::vector<std::optional<double>> normalize_values(std::span<const std::optional<double>> values) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& v : values) {
    if (!v) continue;
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
  }
  if (lo > hi) throw InvalidArgument("cannot normalize a track with no values");

  std::vector<std::optional<double>> out(values.size());
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    if (span == 0.0)
      out[i] = 0.5;
    else
      out[i] = std::clamp((*values[i] - lo) / span, 0.0, 1.0);
  }
  return out;
}

bool SegmentationTrack::has_overlaps() const {
  std::vector<BinRange> ranges;
  for (const auto& s : segments) ranges.push_back(s.bins);
  std::sort(ranges.begin(), ranges.end(), [](const BinRange& a, const BinRange& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].first <= ranges[i - 1].last) return true;
  return false;
}

SegmentationTrack segmentation_from_bed(std::span<const BedRecord> records, const ChromatinModel& model,
                                        std::string name, std::size_t* skipped) {
  SegmentationTrack track;
  track.name = std::move(name);
  std::map<std::string, Rgb> label_colors;
  std::size_t skip = 0;
  for (const auto& rec : records) {
    const auto range = record_bins(rec, model);
    if (!range) {
      ++skip;
      continue;
    }
    std::string label = rec.name.value_or(rec.chrom + ":" + std::to_string(rec.start_bp) + "-" +
                                          std::to_string(rec.end_bp));
    auto it = label_colors.find(label);
    if (it == label_colors.end())
      it = label_colors.emplace(label, seeded_color(track.name, label_colors.size())).first;
    track.segments.push_back({std::move(label), *range, it->second, true});
  }
  if (skipped) *skipped = skip;
  return track;
}

SegmentationTrack segmentation_from_parts(const ChromatinModel& model, std::string name) {
  SegmentationTrack track;
  track.name = std::move(name);
  std::size_t i = 0;
  for (const auto& p : model.parts()) track.segments.push_back({p.name, p.bins, seeded_color(track.name, i++), true});
  return track;
}

std::vector<Marker> markers_from_bed(std::span<const BedRecord> records, const ChromatinModel& model, Rgb color,
                                     std::size_t* skipped) {
  std::vector<Marker> out;
  std::size_t skip = 0;
  for (const auto& rec : records) {
    const auto range = record_bins(rec, model);
    if (!range) {
      ++skip;
      continue;
    }
    const double scale = rec.score.value_or(2.0);
    if (!(scale > 1.0))
      throw InvalidArgument("marker radius scale must be greater than 1, got " + text::format_double(scale));
    out.push_back({*range, color, scale});
  }
  if (skipped) *skipped = skip;
  return out;
}

}  // namespace skein
