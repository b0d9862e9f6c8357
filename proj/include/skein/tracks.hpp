#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skein/color.hpp"
#include "skein/model.hpp"

namespace skein {

/// One BED line: 0-based half-open [start_bp, end_bp).
struct BedRecord {
  std::string chrom;
  std::int64_t start_bp = 0;
  std::int64_t end_bp = 0;
  std::optional<std::string> name;
  std::optional<double> score;        ///< absent when the column is missing or "."
  std::string score_text;             ///< score column exactly as read, for round trips
  std::vector<std::string> extra;     ///< columns 6+ kept verbatim

  friend bool operator==(const BedRecord&, const BedRecord&) = default;
};

/// Parses tab-separated BED. Blank, '#', "track" and "browser" lines are skipped.
/// Throws ParseError (with line number) on fewer than three columns, non-integer
/// coordinates, end <= start, or a non-numeric score.
std::vector<BedRecord> parse_bed(std::string_view text);
std::vector<BedRecord> load_bed(const std::string& path);

/// Tab-joined records, one per line, each terminated by '\n'.
std::string serialize_bed(std::span<const BedRecord> records);

enum class Aggregation { min, max, average, median };

Aggregation parse_aggregation(std::string_view s);
std::string_view to_string(Aggregation a);

struct SignalTrack {
  std::string name;
  std::vector<std::optional<double>> per_bin_values;
  Aggregation aggregation = Aggregation::average;
  std::string colormap_id = "sequential";
};

struct AggregateResult {
  SignalTrack track;
  std::size_t skipped_records = 0;  ///< unknown chromosome or outside the part's bins
};

/// Each bin gets the aggregate of the scores of all records overlapping its genomic span
/// (any overlap counts). Records without a score are ignored.
AggregateResult aggregate_signal(std::span<const BedRecord> records, const ChromatinModel& model,
                                 Aggregation method, std::string name = "signal");

/// Min maps to 0, max to 1, linear in between; a constant input maps to 0.5.
/// Throws InvalidArgument when every value is absent.
std::vector<std::optional<double>> normalize_values(std::span<const std::optional<double>> values);

struct Segment {
  std::string label;
  BinRange bins;
  Rgb color;
  bool visible = true;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationTrack {
  std::string name;
  std::vector<Segment> segments;
  bool visible = true;

  /// True when any two segments share a bin.
  bool has_overlaps() const;
};

/// Segments from BED records; the name column is the label (falls back to "chrom:start-end").
/// Colors are seeded by the track name, one per distinct label.
SegmentationTrack segmentation_from_bed(std::span<const BedRecord> records, const ChromatinModel& model,
                                        std::string name, std::size_t* skipped = nullptr);

/// One segment per part, labelled by the part name.
SegmentationTrack segmentation_from_parts(const ChromatinModel& model, std::string name = "chromosomes");

struct Marker {
  BinRange locus;
  Rgb color;
  double radius_scale = 2.0;  ///< must exceed 1

  friend bool operator==(const Marker&, const Marker&) = default;
};

inline constexpr Rgb kDefaultMarkerColor{238, 102, 119};

/// Markers from BED records; the score column is the radius scale (default 2.0).
/// Throws InvalidArgument when a scale is not greater than 1.
std::vector<Marker> markers_from_bed(std::span<const BedRecord> records, const ChromatinModel& model,
                                     Rgb color = kDefaultMarkerColor, std::size_t* skipped = nullptr);

}  // namespace skein
