#include "skein/protocol.hpp"

#include <istream>
#include <json.hpp>
#include <ostream>

#include "skein/error.hpp"

namespace skein {

namespace {

using nlohmann::json;

Vec3 vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

BinRange range(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("ranges are [first, last] pairs");
  return {j[0].get<BinIndex>(), j[1].get<BinIndex>()};
}

json hit_json(const LoadedSession& s, const std::optional<Hit>& hit) {
  if (!hit) return {{"bin", nullptr}};
  const auto g = bin_to_genomic(s.raw, hit->bin_id);
  return {{"bin", hit->bin_id},
          {"t", hit->t},
          {"position", json::array({hit->position.x, hit->position.y, hit->position.z})},
          {"cap", hit->kind == HitKind::cap},
          {"part", g.part},
          {"start_bp", g.start_bp},
          {"end_bp", g.end_bp}};
}

}  // namespace

ProtocolServer::ProtocolServer(LoadedSession session)
    : loaded_(std::move(session)), scene_(std::make_unique<Scene>(scene_description(loaded_))) {}

std::string ProtocolServer::handle(std::string_view request_line) {
  json response = {{"ok", true}};
  try {
    const json req = json::parse(request_line);
    response["version"] = req.value("version", 0);
    const std::string command = req.at("command").get<std::string>();
    if (command == "pick") {
      const Ray ray{vec(req.at("origin")), normalized(vec(req.at("direction")))};
      response.update(hit_json(loaded_, scene_->trace(ray)));
    } else if (command == "pick_pixel") {
      const Camera cam = session_camera(loaded_, *scene_, req.value("camera", std::string("main")));
      const int x = req.at("x").get<int>();
      const int y = req.at("y").get<int>();
      if (x < 0 || y < 0 || x >= cam.width || y >= cam.height) throw OutOfRange("pixel outside the viewport");
      response.update(hit_json(loaded_, scene_->trace(cam.primary_ray(x, y))));
    } else if (command == "tile") {
      const auto tile = cache_.get(loaded_.raw, req.at("level").get<int>(), range(req.at("rows")), range(req.at("cols")));
      response["level"] = tile->level;
      response["rows"] = {tile->rows.first, tile->rows.last};
      response["cols"] = {tile->cols.first, tile->cols.last};
      response["values"] = tile->values;
    } else if (command == "render") {
      LoadedSession view = loaded_;
      view.session.render.width = req.value("width", view.session.render.width);
      view.session.render.height = req.value("height", view.session.render.height);
      const Camera cam = session_camera(view, *scene_, req.value("camera", std::string("main")));
      RenderSettings settings;
      settings.background = view.session.render.background;
      settings.bin_colors = bin_colors(view);
      if (view.session.render.ssao.enabled) settings.ssao = effective_ssao(view);
      const RenderResult r = render(*scene_, cam, settings);
      const std::string out = req.at("out").get<std::string>();
      write_image(r.image, out, image_format_for(out));
      response["out"] = out;
      response["width"] = r.image.width;
      response["height"] = r.image.height;
    } else if (command == "info") {
      response["bins"] = loaded_.raw.size();
      response["parts"] = loaded_.raw.parts().size();
      response["primitives"] = scene_->primitives().size();
      response["selections"] = loaded_.selections.size();
    } else {
      throw InvalidArgument("unknown command '" + command + "'");
    }
  } catch (const std::exception& e) {
    response["ok"] = false;
    response["error"] = e.what();
  }
  return response.dump();
}

void ProtocolServer::serve(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle(line) << '\n' << std::flush;
  }
}

}  // namespace skein
