#include "skein/session.hpp"

#include <algorithm>
#include <json.hpp>

#include "skein/error.hpp"
#include "skein/text.hpp"

namespace skein {

namespace {

using nlohmann::json;

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError(0, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json ranges_to_json(const std::vector<BinRange>& ranges) {
  json out = json::array();
  for (const auto& r : ranges) out.push_back(json::array({r.first, r.last}));
  return out;
}

std::vector<BinRange> ranges_from_json(const json& j) {
  std::vector<BinRange> out;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2) throw ParseError(0, "bin ranges are [first, last] pairs");
    out.push_back({r[0].get<BinIndex>(), r[1].get<BinIndex>()});
  }
  return out;
}

std::vector<BinRange> runs_of(const BinSet& bins) {
  std::vector<BinRange> out;
  for (BinIndex b : bins.indices()) {
    if (!out.empty() && out.back().last + 1 == b) out.back().last = b;
    else out.push_back({b, b});
  }
  return out;
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

template <typename T>
std::optional<T> optional_value(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::optional<Rgb> optional_color(const json& j, const char* key) {
  if (auto s = optional_value<std::string>(j, key)) return parse_hex_color(*s);
  return std::nullopt;
}

json camera_to_json(const StoredCamera& c) {
  return {{"name", c.name},
          {"position", vec_to_json(c.camera.position)},
          {"target", vec_to_json(c.camera.target)},
          {"up", vec_to_json(c.camera.up)},
          {"vertical_fov", c.camera.vertical_fov},
          {"near", c.camera.near},
          {"far", c.camera.far}};
}

StoredCamera camera_from_json(const json& j) {
  StoredCamera c;
  c.name = value_or<std::string>(j, "name", "main");
  c.camera.position = vec_from_json(j.at("position"));
  c.camera.target = vec_from_json(j.at("target"));
  c.camera.up = j.contains("up") ? vec_from_json(j.at("up")) : Vec3{0, 1, 0};
  c.camera.vertical_fov = value_or(j, "vertical_fov", 45.0);
  c.camera.near = value_or(j, "near", 1e-3);
  c.camera.far = value_or(j, "far", 1e3);
  return c;
}

json plane_to_json(const CuttingPlane& p) {
  json j = {{"normal", vec_to_json(p.normal)},
            {"offset", p.offset},
            {"keep", std::string(to_string(p.keep))},
            {"exempt_selections", p.exempt_selections}};
  if (p.axis) j["axis"] = std::string(to_string(*p.axis));
  return j;
}

CuttingPlane plane_from_json(const json& j) {
  const KeepSide keep = parse_keep_side(value_or<std::string>(j, "keep", "negative"));
  const double offset = value_or(j, "offset", 0.0);
  CuttingPlane p;
  if (const auto axis = optional_value<std::string>(j, "axis")) {
    p = CuttingPlane::along_axis(parse_axis(*axis), offset, keep);
  } else {
    p.normal = normalized(vec_from_json(j.at("normal")));
    p.offset = offset;
    p.keep = keep;
  }
  p.exempt_selections = value_or(j, "exempt_selections", std::vector<SelectionId>{});
  return p;
}

json to_json(const Session& s) {
  json models = json::array();
  for (const auto& m : s.models) models.push_back({{"id", m.id}, {"path", m.path}, {"resolution_bp", m.resolution_bp}});

  json tracks = json::array();
  for (const auto& t : s.tracks) {
    json j = {{"name", t.name},
              {"kind", std::string(to_string(t.kind))},
              {"path", t.path},
              {"model", t.model},
              {"aggregation", std::string(to_string(t.aggregation))},
              {"colormap", t.colormap},
              {"visible", t.visible},
              {"hidden_segments", t.hidden_segments}};
    if (t.color) j["color"] = to_hex(*t.color);
    tracks.push_back(std::move(j));
  }

  json selections = json::array();
  for (const auto& sel : s.selections)
    selections.push_back({{"id", sel.id},
                          {"model", sel.model},
                          {"name", sel.name},
                          {"bins", ranges_to_json(sel.bins)},
                          {"color", to_hex(sel.color)},
                          {"visible", sel.visible},
                          {"clip_exempt", sel.clip_exempt},
                          {"order", sel.order}});

  json cameras = json::array();
  for (const auto& c : s.cameras) cameras.push_back(camera_to_json(c));

  json planes = json::array();
  for (const auto& p : s.cutting_planes) planes.push_back(plane_to_json(p));

  const RenderConfig& r = s.render;
  json ssao = {{"enabled", r.ssao.enabled}, {"samples", r.ssao.samples}, {"strength", r.ssao.strength}};
  if (r.ssao.radius_near) ssao["radius_near"] = *r.ssao.radius_near;
  if (r.ssao.radius_far) ssao["radius_far"] = *r.ssao.radius_far;
  json render = {{"representation", std::string(to_string(r.representation))},
                 {"ssao", ssao},
                 {"background", to_hex(r.background)},
                 {"width", r.width},
                 {"height", r.height}};
  if (r.radius) render["radius"] = *r.radius;
  if (r.color_track) render["color_track"] = *r.color_track;

  return {{"schema_version", s.schema_version},
          {"seed", s.seed},
          {"models", models},
          {"tracks", tracks},
          {"selections", selections},
          {"cameras", cameras},
          {"render", render},
          {"cutting_planes", planes},
          {"layout", json::parse(s.layout)}};
}

Session from_json(const json& j) {
  if (!j.is_object()) throw ParseError(0, "session must be a JSON object");
  Session s;
  s.schema_version = j.at("schema_version").get<int>();
  if (s.schema_version != kSessionSchemaVersion)
    throw ParseError(0, "unsupported session schema_version " + std::to_string(s.schema_version));
  s.seed = value_or<std::uint64_t>(j, "seed", 1);
  for (const auto& m : j.at("models"))
    s.models.push_back({m.at("id").get<std::string>(), m.at("path").get<std::string>(),
                        value_or<std::int64_t>(m, "resolution_bp", 1)});
  for (const auto& t : value_or(j, "tracks", json::array())) {
    TrackRef r;
    r.name = t.at("name").get<std::string>();
    r.kind = parse_track_kind(t.at("kind").get<std::string>());
    r.path = t.at("path").get<std::string>();
    r.model = value_or<std::string>(t, "model", s.models.empty() ? "" : s.models.front().id);
    r.aggregation = parse_aggregation(value_or<std::string>(t, "aggregation", "average"));
    r.colormap = value_or<std::string>(t, "colormap", "sequential");
    r.visible = value_or(t, "visible", true);
    r.hidden_segments = value_or(t, "hidden_segments", std::vector<std::string>{});
    r.color = optional_color(t, "color");
    s.tracks.push_back(std::move(r));
  }
  for (const auto& sel : value_or(j, "selections", json::array())) {
    StoredSelection st;
    st.id = sel.at("id").get<SelectionId>();
    st.model = value_or<std::string>(sel, "model", s.models.empty() ? "" : s.models.front().id);
    st.name = value_or<std::string>(sel, "name", "selection " + std::to_string(st.id));
    st.bins = ranges_from_json(sel.at("bins"));
    st.color = parse_hex_color(sel.at("color").get<std::string>());
    st.visible = value_or(sel, "visible", true);
    st.clip_exempt = value_or(sel, "clip_exempt", false);
    st.order = sel.at("order").get<std::uint64_t>();
    s.selections.push_back(std::move(st));
  }
  for (const auto& c : value_or(j, "cameras", json::array())) s.cameras.push_back(camera_from_json(c));
  if (const auto it = j.find("render"); it != j.end()) {
    const json& r = *it;
    RenderConfig& cfg = s.render;
    cfg.representation = parse_representation(value_or<std::string>(r, "representation", "smooth_tube"));
    cfg.radius = optional_value<double>(r, "radius");
    cfg.background = optional_color(r, "background").value_or(Rgb{255, 255, 255});
    cfg.color_track = optional_value<std::string>(r, "color_track");
    cfg.width = value_or(r, "width", 512);
    cfg.height = value_or(r, "height", 512);
    if (const auto ss = r.find("ssao"); ss != r.end()) {
      cfg.ssao.enabled = value_or(*ss, "enabled", true);
      cfg.ssao.radius_near = optional_value<double>(*ss, "radius_near");
      cfg.ssao.radius_far = optional_value<double>(*ss, "radius_far");
      cfg.ssao.samples = value_or(*ss, "samples", 16);
      cfg.ssao.strength = value_or(*ss, "strength", 1.0);
    }
  }
  for (const auto& p : value_or(j, "cutting_planes", json::array())) s.cutting_planes.push_back(plane_from_json(p));
  if (const auto it = j.find("layout"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError(0, "layout must be a JSON object");
    s.layout = it->dump();
  }
  s.validate();
  return s;
}

}  // namespace

TrackKind parse_track_kind(std::string_view s) {
  if (s == "signal") return TrackKind::signal;
  if (s == "segmentation") return TrackKind::segmentation;
  if (s == "markers") return TrackKind::markers;
  throw InvalidArgument("unknown track kind '" + std::string(s) + "'");
}

std::string_view to_string(TrackKind k) {
  switch (k) {
    case TrackKind::signal: return "signal";
    case TrackKind::segmentation: return "segmentation";
    case TrackKind::markers: return "markers";
  }
  return "signal";
}

const ModelRef& Session::model(std::string_view id) const {
  for (const auto& m : models)
    if (m.id == id) return m;
  throw InvalidArgument("unknown model id '" + std::string(id) + "'");
}

void Session::validate() const {
  if (models.empty()) throw InvalidArgument("session lists no models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].resolution_bp < 1) throw InvalidArgument("model resolution must be at least 1 bp");
    for (std::size_t k = 0; k < i; ++k)
      if (models[k].id == models[i].id) throw InvalidArgument("duplicate model id '" + models[i].id + "'");
  }
  for (const auto& t : tracks) model(t.model);
  std::vector<SelectionId> ids;
  for (const auto& s : selections) {
    model(s.model);
    if (std::find(ids.begin(), ids.end(), s.id) != ids.end())
      throw InvalidArgument("duplicate selection id " + std::to_string(s.id));
    ids.push_back(s.id);
    for (const auto& r : s.bins)
      if (r.first > r.last) throw InvalidArgument("selection range with first > last");
  }
  for (const auto& p : cutting_planes)
    for (SelectionId id : p.exempt_selections)
      if (std::find(ids.begin(), ids.end(), id) == ids.end())
        throw InvalidArgument("cutting plane exempts unknown selection " + std::to_string(id));
  if (cutting_planes.size() > kMaxCuttingPlanes) throw InvalidArgument("too many cutting planes");
  if (render.color_track &&
      std::none_of(tracks.begin(), tracks.end(), [&](const TrackRef& t) { return t.name == *render.color_track; }))
    throw InvalidArgument("color track '" + *render.color_track + "' is not in the session");
  if (render.width <= 0 || render.height <= 0) throw InvalidArgument("render size must be positive");
}

Session parse_session(std::string_view json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid session: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(0, std::string("invalid session: ") + e.what());
  }
}

std::string serialize_session(const Session& session) {
  session.validate();
  return to_json(session).dump(2) + "\n";
}

Session load_session(const std::string& path) { return parse_session(text::read_file(path)); }

void save_session(const Session& session, const std::string& path) {
  text::write_file(path, serialize_session(session));
}

LoadedSession load_session_data(Session session, const std::filesystem::path& base_dir) {
  session.validate();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() ? path : base_dir / path).string();
  };
  const ModelRef& ref = session.models.front();
  ChromatinModel raw = load_model(resolve(ref.path), ref.resolution_bp);
  ChromatinModel norm = normalize_model(raw);
  LoadedSession out{std::move(session), base_dir, std::move(raw), std::move(norm), {}, {}, {}, SelectionSet(0)};
  out.selections = SelectionSet(out.raw.size());

  for (const auto& t : out.session.tracks) {
    if (t.model != ref.id) continue;
    const auto records = load_bed(resolve(t.path));
    switch (t.kind) {
      case TrackKind::signal: {
        auto track = aggregate_signal(records, out.raw, t.aggregation, t.name).track;
        track.colormap_id = t.colormap;
        out.signals.push_back(std::move(track));
        break;
      }
      case TrackKind::segmentation: {
        auto track = segmentation_from_bed(records, out.raw, t.name);
        track.visible = t.visible;
        for (auto& seg : track.segments)
          if (std::find(t.hidden_segments.begin(), t.hidden_segments.end(), seg.label) != t.hidden_segments.end())
            seg.visible = false;
        out.segmentations.push_back(std::move(track));
        break;
      }
      case TrackKind::markers: {
        auto markers = markers_from_bed(records, out.raw, t.color.value_or(kDefaultMarkerColor));
        if (t.visible) out.markers.insert(out.markers.end(), markers.begin(), markers.end());
        break;
      }
    }
  }

  std::vector<StoredSelection> stored;
  for (const auto& s : out.session.selections)
    if (s.model == ref.id) stored.push_back(s);
  std::sort(stored.begin(), stored.end(), [](const auto& a, const auto& b) { return a.order < b.order; });
  for (const auto& s : stored) {
    BinSet bins(out.raw.size());
    for (const auto& r : s.bins) {
      if (r.last >= out.raw.size()) throw InvalidArgument("selection '" + s.name + "' refers to bins past the model end");
      for (BinIndex b = r.first; b <= r.last; ++b) bins.set(b);
    }
    out.selections.restore({s.id, s.name, std::move(bins), s.color, s.visible, s.clip_exempt, s.order});
  }
  return out;
}

double effective_radius(const LoadedSession& loaded) {
  if (loaded.session.render.radius) {
    if (!(*loaded.session.render.radius > 0.0)) throw InvalidArgument("radius must be positive");
    return *loaded.session.render.radius;
  }
  std::vector<double> spacings;
  for (const auto& part : loaded.normalized.parts())
    for (BinIndex i = part.bins.first; i < part.bins.last; ++i)
      spacings.push_back(distance(loaded.normalized.bin(i), loaded.normalized.bin(i + 1)));
  // A model of isolated bins has no spacing to learn from.
  if (spacings.empty()) return 0.05;
  return estimate_tube_radius(spacings).default_radius;
}

SsaoSettings effective_ssao(const LoadedSession& loaded) {
  const SsaoConfig& cfg = loaded.session.render.ssao;
  SsaoSettings s;
  s.radius_far = cfg.radius_far.value_or(0.25);
  s.radius_near = cfg.radius_near.value_or(4.0 * effective_radius(loaded));
  if (!cfg.radius_near && s.radius_near >= s.radius_far) s.radius_near = 0.5 * s.radius_far;
  s.samples_per_pixel = cfg.samples;
  s.seed = loaded.session.seed;
  s.strength = cfg.strength;
  s.validate();
  return s;
}

std::vector<std::optional<Rgb>> base_colors(const LoadedSession& loaded) {
  const auto& name = loaded.session.render.color_track;
  if (!name) return {};
  std::vector<std::optional<Rgb>> out(loaded.raw.size());
  for (const auto& sig : loaded.signals) {
    if (sig.name != *name) continue;
    const auto norm = normalize_values(sig.per_bin_values);
    const auto colors = apply_colormap(norm, sig.colormap_id);
    for (BinIndex b = 0; b < out.size(); ++b)
      if (norm[b]) out[b] = colors[b];
    return out;
  }
  for (const auto& seg : loaded.segmentations) {
    if (seg.name != *name) continue;
    for (const auto& s : seg.segments)
      for (BinIndex b = s.bins.first; b <= s.bins.last; ++b) out[b] = s.color;
    return out;
  }
  // Marker tracks carry no base color.
  return {};
}

SceneDescription scene_description(const LoadedSession& loaded) {
  const double radius = effective_radius(loaded);
  SceneDescription d;
  d.bin_count = loaded.normalized.size();
  d.primitives = build_representation(loaded.normalized, loaded.session.render.representation, radius);
  for (const auto& m : loaded.markers)
    for (BinIndex b = m.locus.first; b <= m.locus.last; ++b)
      d.primitives.push_back({Sphere{loaded.normalized.bin(b), radius * m.radius_scale}, b});

  const BinSet visible = visible_bins(loaded.selections, loaded.segmentations);
  d.visible.resize(d.bin_count);
  for (BinIndex b = 0; b < d.bin_count; ++b) d.visible[b] = visible.test(b);

  d.planes = loaded.session.cutting_planes;
  if (!d.planes.empty()) {
    const std::uint64_t all = d.planes.size() == 64 ? ~0ULL : ((1ULL << d.planes.size()) - 1);
    d.plane_masks.assign(d.bin_count, all);
    for (const auto& sel : loaded.selections.selections()) {
      std::uint64_t cleared = sel.clip_exempt ? all : 0;
      for (std::size_t i = 0; i < d.planes.size(); ++i) {
        const auto& ex = d.planes[i].exempt_selections;
        if (std::find(ex.begin(), ex.end(), sel.id) != ex.end()) cleared |= 1ULL << i;
      }
      if (cleared == 0) continue;
      for (BinIndex b : sel.bins.indices()) d.plane_masks[b] &= ~cleared;
    }
  }
  return d;
}

std::vector<Rgb> bin_colors(const LoadedSession& loaded) {
  const auto base = base_colors(loaded);
  const auto appearance = resolve_all(loaded.selections, base, loaded.markers);
  std::vector<Rgb> out;
  out.reserve(appearance.size());
  for (const auto& a : appearance) out.push_back(a.color);
  return out;
}

Camera session_camera(const LoadedSession& loaded, const Scene& scene, std::string_view name) {
  const RenderConfig& r = loaded.session.render;
  for (const auto& c : loaded.session.cameras) {
    if (c.name != name) continue;
    Camera cam = c.camera;
    cam.width = r.width;
    cam.height = r.height;
    cam.validate();
    return cam;
  }
  return Camera::framing(scene.bounds(), r.width, r.height);
}

void store_selections(Session& session, const SelectionSet& selections, std::string_view model_id) {
  std::erase_if(session.selections, [&](const StoredSelection& s) { return s.model == model_id; });
  for (const auto& s : selections.selections())
    session.selections.push_back(
        {s.id, std::string(model_id), s.name, runs_of(s.bins), s.color, s.visible, s.clip_exempt, s.order});
  std::sort(session.selections.begin(), session.selections.end(),
            [](const auto& a, const auto& b) { return a.order < b.order; });
}

}  // namespace skein
