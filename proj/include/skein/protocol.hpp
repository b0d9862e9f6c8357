#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "skein/session.hpp"

namespace skein {

/// Request/response boundary for an interactive front end. Each request is one JSON
/// object per line with a "command" and an integer "version"; the response echoes the
/// version so a client can drop stale answers.
///
///   {"version": 3, "command": "pick", "origin": [x, y, z], "direction": [x, y, z]}
///   {"version": 4, "command": "pick_pixel", "x": 10, "y": 20, "camera": "main"}
///   {"version": 5, "command": "tile", "level": 0, "rows": [0, 9], "cols": [0, 9]}
///   {"version": 6, "command": "render", "out": "frame.png", "width": 256, "height": 256}
///   {"version": 7, "command": "info"}
class ProtocolServer {
 public:
  explicit ProtocolServer(LoadedSession session);

  /// Never throws: failures become {"ok": false, "error": "..."}.
  std::string handle(std::string_view request_line);
  /// Answers every line of `in` on `out` until end of input.
  void serve(std::istream& in, std::ostream& out);

  const LoadedSession& session() const { return loaded_; }
  const Scene& scene() const { return *scene_; }

 private:
  LoadedSession loaded_;
  std::unique_ptr<Scene> scene_;
  TileCache cache_;
};

}  // namespace skein
