#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skein/analysis.hpp"
#include "skein/geometry.hpp"
#include "skein/raycast.hpp"
#include "skein/renderer.hpp"
#include "skein/scene.hpp"
#include "skein/selections.hpp"
#include "skein/tracks.hpp"

namespace skein {

inline constexpr int kSessionSchemaVersion = 1;

struct ModelRef {
  std::string id;
  std::string path;  ///< relative paths resolve against the session file's directory
  std::int64_t resolution_bp = 1;
};

enum class TrackKind { signal, segmentation, markers };
TrackKind parse_track_kind(std::string_view s);
std::string_view to_string(TrackKind k);

struct TrackRef {
  std::string name;
  TrackKind kind = TrackKind::signal;
  std::string path;
  std::string model;
  Aggregation aggregation = Aggregation::average;
  std::string colormap = "sequential";
  bool visible = true;
  std::vector<std::string> hidden_segments;  ///< segment labels hidden in this track
  std::optional<Rgb> color;                  ///< marker color
};

struct StoredSelection {
  SelectionId id = 0;
  std::string model;
  std::string name;
  std::vector<BinRange> bins;
  Rgb color;
  bool visible = true;
  bool clip_exempt = false;
  std::uint64_t order = 0;
};

struct StoredCamera {
  std::string name = "main";
  Camera camera;
};

struct SsaoConfig {
  bool enabled = true;
  std::optional<double> radius_near;  ///< defaults to 4 x tube radius
  std::optional<double> radius_far;   ///< defaults to 0.25 (the normalized model's bounding radius)
  int samples = 16;
  double strength = 1.0;
};

struct RenderConfig {
  Representation representation = Representation::smooth_tube;
  std::optional<double> radius;  ///< normalized-model units; defaults to the spacing estimate
  SsaoConfig ssao;
  Rgb background{255, 255, 255};
  std::optional<std::string> color_track;  ///< signal or segmentation track used as base color
  int width = 512;
  int height = 512;
};

/// Everything needed to reproduce a view. Cameras and planes live in the normalized frame
/// of the first model; analysis coordinates (selection radii) use the file's own units.
struct Session {
  int schema_version = kSessionSchemaVersion;
  std::uint64_t seed = 1;
  std::vector<ModelRef> models;
  std::vector<TrackRef> tracks;
  std::vector<StoredSelection> selections;
  std::vector<StoredCamera> cameras;
  RenderConfig render;
  std::vector<CuttingPlane> cutting_planes;
  std::string layout = "{}";  ///< viewer layout hints, a JSON object kept verbatim

  /// Throws InvalidArgument when a reference does not resolve.
  void validate() const;
  const ModelRef& model(std::string_view id) const;
};

/// Throws ParseError for malformed JSON or a schema mismatch.
Session parse_session(std::string_view json_text);
/// Canonical form: sorted keys, two-space indent, trailing newline.
std::string serialize_session(const Session& session);
Session load_session(const std::string& path);
void save_session(const Session& session, const std::string& path);

/// A session with its files loaded, ready to render or query.
struct LoadedSession {
  Session session;
  std::filesystem::path base_dir;
  ChromatinModel raw;         ///< first model as read
  ChromatinModel normalized;  ///< first model, centred and scaled to unit radius
  std::vector<SignalTrack> signals;
  std::vector<SegmentationTrack> segmentations;
  std::vector<Marker> markers;
  SelectionSet selections;
};

LoadedSession load_session_data(Session session, const std::filesystem::path& base_dir);

/// Tube radius in normalized units: the session value or the spacing estimate.
double effective_radius(const LoadedSession& loaded);
SsaoSettings effective_ssao(const LoadedSession& loaded);

/// Base color per bin from the session's color track (empty when none).
std::vector<std::optional<Rgb>> base_colors(const LoadedSession& loaded);

/// Primitives, visibility, planes and per-bin plane masks for rendering or picking.
SceneDescription scene_description(const LoadedSession& loaded);
/// Per-bin colors after marker/selection/annotation precedence.
std::vector<Rgb> bin_colors(const LoadedSession& loaded);
/// Stored camera `name`, or a framing of the scene.
Camera session_camera(const LoadedSession& loaded, const Scene& scene, std::string_view name = "main");

/// Writes the selection set back into the session (first model).
void store_selections(Session& session, const SelectionSet& selections, std::string_view model_id);

}  // namespace skein
