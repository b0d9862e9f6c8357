#include "skein/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "skein/analysis.hpp"
#include "skein/error.hpp"
#include "skein/protocol.hpp"
#include "skein/session.hpp"
#include "skein/text.hpp"

namespace skein {

namespace {

namespace fs = std::filesystem;

/// Bad flag combinations found after parsing; reported like parse errors (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

GenomicInterval parse_region(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos) throw UsageError("region must look like part:start-end");
  std::string coords;
  for (char c : s.substr(colon + 1))
    if (c != ',') coords.push_back(c);
  const auto fields = text::split_exact(coords, '-');
  if (fields.size() != 2) throw UsageError("region must look like part:start-end");
  const auto start = text::parse_int(fields[0]);
  const auto end = text::parse_int(fields[1]);
  if (!start || !end) throw UsageError("region coordinates must be integers");
  return {std::string(s.substr(0, colon)), *start, *end};
}

BinRange parse_index_range(std::string_view s) {
  const auto fields = text::split_exact(s, '-');
  const auto a = text::parse_int(fields.front());
  const auto b = fields.size() == 2 ? text::parse_int(fields[1]) : a;
  if (fields.size() > 2 || !a || !b || *a < 0 || *b < *a) throw UsageError("index ranges look like first-last");
  return {static_cast<BinIndex>(*a), static_cast<BinIndex>(*b)};
}

Vec3 parse_point(std::string_view s) {
  const auto f = text::split_any(s, ", ");
  if (f.size() != 3) throw UsageError("points look like x,y,z");
  Vec3 p;
  for (int k = 0; k < 3; ++k) {
    const auto v = text::parse_double(f[k]);
    if (!v) throw UsageError("points look like x,y,z");
    p[k] = *v;
  }
  return p;
}

void emit(const std::string& data, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") out << data;
  else text::write_file(path, data);
}

std::string tile_tsv(const DistanceTile& t) {
  std::string s;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    for (std::size_t c = 0; c < t.col_count(); ++c) {
      if (c) s.push_back('\t');
      s += text::format_double(t.at(r, c));
    }
    s.push_back('\n');
  }
  return s;
}

Image tile_image(const DistanceTile& t) {
  double top = 0.0;
  for (double v : t.values) top = std::max(top, v);
  const Colormap& map = builtin_colormap("sequential");
  Image img{static_cast<int>(t.col_count()), static_cast<int>(t.row_count()), {}};
  img.rgb.reserve(t.values.size() * 3);
  for (double v : t.values) {
    // Close pairs are bright, matching the usual contact-map reading.
    const Rgb c = map.sample(top > 0.0 ? 1.0 - v / top : 1.0);
    img.rgb.insert(img.rgb.end(), {c.r, c.g, c.b});
  }
  return img;
}

/// Merged indices whose groups overlap the bins of `region`.
BinRange merged_range_for(const MergedBins& merged, BinRange bins) {
  std::optional<BinRange> out;
  for (BinIndex i = 0; i < merged.groups.size(); ++i) {
    const auto& g = merged.groups[i];
    if (g.last < bins.first || g.first > bins.last) continue;
    if (!out) out = BinRange{i, i};
    out->last = i;
  }
  if (!out) throw OutOfRange("region holds no bins");
  return *out;
}

std::string relative_to(const std::string& path, const fs::path& dir) {
  const fs::path p = fs::absolute(path);
  return fs::relative(p, fs::absolute(dir)).generic_string();
}

fs::path dir_of(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

Session minimal_session(const std::string& model_path, std::int64_t resolution, const fs::path& base) {
  Session s;
  s.models.push_back({"main", relative_to(model_path, base), resolution});
  return s;
}

struct RenderOptions {
  std::string session_path;
  std::string model_path;
  std::int64_t resolution = 1;
  std::string out;
  std::string format;
  std::string camera = "main";
  std::optional<std::uint64_t> seed;
  std::optional<int> width, height, samples;
  std::optional<std::string> representation;
  std::optional<double> radius, ssao_near, ssao_far;
  bool no_ssao = false;
};

int cmd_render(const RenderOptions& o, std::ostream& err) {
  if (o.session_path.empty() == o.model_path.empty()) throw UsageError("render needs exactly one of --session or --model");
  Session session;
  fs::path base;
  if (!o.session_path.empty()) {
    session = load_session(o.session_path);
    base = dir_of(o.session_path);
  } else {
    base = fs::current_path();
    session = minimal_session(o.model_path, o.resolution, base);
  }
  if (o.seed) session.seed = *o.seed;
  if (o.width) session.render.width = *o.width;
  if (o.height) session.render.height = *o.height;
  if (o.representation) session.render.representation = parse_representation(*o.representation);
  if (o.radius) session.render.radius = *o.radius;
  if (o.ssao_near) session.render.ssao.radius_near = *o.ssao_near;
  if (o.ssao_far) session.render.ssao.radius_far = *o.ssao_far;
  if (o.samples) session.render.ssao.samples = *o.samples;
  if (o.no_ssao) session.render.ssao.enabled = false;
  session.validate();

  const LoadedSession loaded = load_session_data(std::move(session), base);
  const Scene scene(scene_description(loaded));
  const Camera cam = session_camera(loaded, scene, o.camera);
  RenderSettings settings;
  settings.background = loaded.session.render.background;
  settings.bin_colors = bin_colors(loaded);
  if (loaded.session.render.ssao.enabled) settings.ssao = effective_ssao(loaded);
  IntersectStats stats;
  const RenderResult r = render(scene, cam, settings, &stats);
  const ImageFormat format = o.format.empty() ? image_format_for(o.out) : parse_image_format(o.format);
  write_image(r.image, o.out, format);

  err << "representation: " << to_string(loaded.session.render.representation) << "\n"
      << "bins: " << loaded.raw.size() << ", primitives: " << scene.primitives().size() << "\n"
      << "radius: " << text::format_double(effective_radius(loaded)) << "\n";
  if (settings.ssao)
    err << "ssao: near " << text::format_double(settings.ssao->radius_near) << ", far "
        << text::format_double(settings.ssao->radius_far) << ", samples " << settings.ssao->samples_per_pixel
        << ", seed " << settings.ssao->seed << "\n";
  else
    err << "ssao: off\n";
  err << "image: " << r.image.width << "x" << r.image.height << " " << (format == ImageFormat::png ? "png" : "ppm")
      << " -> " << o.out << "\n";
  err << "time: gbuffer " << r.timings.gbuffer_s << " s, ssao " << r.timings.ssao_s << " s, total "
      << r.timings.total_s << " s\n";
  if (const auto nc = stats.nonconverged.load()) err << "warning: " << nc << " swept-sphere solves did not converge\n";
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Chromatin 3D model rendering and analysis", "skein"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "skein 0.1.0");

  // info
  std::string model_path;
  std::int64_t resolution = 1;
  auto* info = app.add_subcommand("info", "Summarize a model: bins, parts, spacing, radius bounds");
  info->add_option("model,--model", model_path, "skein-xyz model file")->required();
  info->add_option("--resolution", resolution, "Basepairs per bin")->check(CLI::PositiveNumber);

  // genome
  std::string lengths_path;
  std::int64_t genome_res = 0;
  auto* genome = app.add_subcommand("genome", "Bin count for a genome tiled at a resolution");
  genome->add_option("--lengths", lengths_path, "Tab-separated name/length file")->required();
  genome->add_option("--resolution", genome_res, "Basepairs per bin")->required()->check(CLI::PositiveNumber);

  // init
  std::string init_out;
  std::vector<std::string> signals, segmentations, marker_files;
  std::optional<std::string> color_track;
  std::optional<std::string> init_repr;
  std::uint64_t init_seed = 1;
  auto* init = app.add_subcommand("init", "Create a session file for a model");
  init->add_option("--model", model_path, "skein-xyz model file")->required();
  init->add_option("--resolution", resolution, "Basepairs per bin")->check(CLI::PositiveNumber);
  init->add_option("--out", init_out, "Session file to write")->required();
  init->add_option("--signal", signals, "BED signal track (repeatable)");
  init->add_option("--segmentation", segmentations, "BED segmentation track (repeatable)");
  init->add_option("--markers", marker_files, "BED marker track (repeatable)");
  init->add_option("--color-track", color_track, "Track name used for base colors");
  init->add_option("--representation", init_repr, "spheres, straight_tube or smooth_tube");
  init->add_option("--seed", init_seed, "Seed for sampling and generated colors");

  // render
  RenderOptions ro;
  auto* rend = app.add_subcommand("render", "Render a session (or a bare model) to an image");
  rend->add_option("--session", ro.session_path, "Session file");
  rend->add_option("--model", ro.model_path, "Model file, rendered with defaults");
  rend->add_option("--resolution", ro.resolution, "Basepairs per bin (with --model)")->check(CLI::PositiveNumber);
  rend->add_option("--out", ro.out, "Output image")->required();
  rend->add_option("--format", ro.format, "ppm or png (default: from the extension)")
      ->check(CLI::IsMember({"ppm", "png"}));
  rend->add_option("--camera", ro.camera, "Stored camera name");
  rend->add_option("--seed", ro.seed, "SSAO seed");
  rend->add_option("--width", ro.width, "Image width")->check(CLI::PositiveNumber);
  rend->add_option("--height", ro.height, "Image height")->check(CLI::PositiveNumber);
  rend->add_option("--representation", ro.representation, "spheres, straight_tube or smooth_tube")
      ->check(CLI::IsMember({"spheres", "straight_tube", "smooth_tube"}));
  rend->add_option("--radius", ro.radius, "Tube radius in normalized units")->check(CLI::PositiveNumber);
  rend->add_option("--ssao-near", ro.ssao_near, "Near SSAO radius")->check(CLI::PositiveNumber);
  rend->add_option("--ssao-far", ro.ssao_far, "Far SSAO radius")->check(CLI::PositiveNumber);
  rend->add_option("--ssao-samples", ro.samples, "SSAO samples per pixel")->check(CLI::Range(8, 1024));
  rend->add_flag("--no-ssao", ro.no_ssao, "Phong shading only");

  // distmap
  std::string dm_session, dm_out, dm_format = "tsv", dm_region, dm_rows, dm_cols;
  int level = 0;
  std::optional<SelectionId> dm_selection;
  auto* distmap = app.add_subcommand("distmap", "Distance map (or one tile) as TSV or PNG");
  distmap->add_option("--model", model_path, "skein-xyz model file");
  distmap->add_option("--resolution", resolution, "Basepairs per bin")->check(CLI::PositiveNumber);
  distmap->add_option("--session", dm_session, "Session file (for --selection)");
  distmap->add_option("--selection", dm_selection, "Restrict to a session selection id");
  distmap->add_option("--level", level, "Level of detail (2^level bins per entry)")->check(CLI::NonNegativeNumber);
  distmap->add_option("--region", dm_region, "part:start-end, both axes");
  distmap->add_option("--rows", dm_rows, "Merged row range first-last");
  distmap->add_option("--cols", dm_cols, "Merged column range first-last");
  distmap->add_option("--format", dm_format, "tsv or png")->check(CLI::IsMember({"tsv", "png"}));
  distmap->add_option("--out", dm_out, "Output file (default: standard output, TSV only)");

  // sasa
  std::string sasa_out;
  std::optional<double> bin_radius, probe;
  int samples = 960;
  std::vector<std::string> subset_regions;
  auto* sasa = app.add_subcommand("sasa", "Per-bin solvent accessible surface area as BED");
  sasa->add_option("--model", model_path, "skein-xyz model file")->required();
  sasa->add_option("--resolution", resolution, "Basepairs per bin")->check(CLI::PositiveNumber);
  sasa->add_option("--bin-radius", bin_radius, "Bin sphere radius (default: spacing estimate)")
      ->check(CLI::PositiveNumber);
  sasa->add_option("--probe", probe, "Probe radius (default: 0.4 x bin radius)")->check(CLI::NonNegativeNumber);
  sasa->add_option("--samples", samples, "Points per sphere")->check(CLI::Range(92, 1000000));
  sasa->add_option("--subset", subset_regions, "part:start-end; restricts neighbours and output (repeatable)");
  sasa->add_option("--format", dm_format, "bed")->check(CLI::IsMember({"bed"}));
  sasa->add_option("--out", sasa_out, "Output BED (default: standard output)");

  // select
  std::string sel_session, sel_out, tool, sel_name, sel_color, sel_center;
  std::vector<std::int64_t> sel_args;
  std::optional<BinIndex> sel_bin;
  std::optional<double> sel_radius;
  std::optional<SelectionId> sel_into;
  bool sel_remove = false;
  auto* select = app.add_subcommand("select", "Add a selection to a session");
  select->add_option("tool", tool, "point, sphere or sequence")
      ->required()
      ->check(CLI::IsMember({"point", "sphere", "sequence"}));
  select->add_option("bins", sel_args, "Bin indices (point: one, sequence: two)");
  select->add_option("--session", sel_session, "Session file")->required();
  select->add_option("--out", sel_out, "Write the updated session here (default: in place)");
  select->add_option("--bin", sel_bin, "Sphere centre bin");
  select->add_option("--center", sel_center, "Sphere centre x,y,z in model units");
  select->add_option("--radius", sel_radius, "Sphere radius in model units")->check(CLI::PositiveNumber);
  select->add_option("--into", sel_into, "Point tool: edit this selection instead of creating one");
  select->add_flag("--remove", sel_remove, "Point tool: remove the bin");
  select->add_option("--name", sel_name, "Selection name");
  select->add_option("--color", sel_color, "Selection color #rrggbb");

  // serve
  std::string serve_session;
  auto* serve = app.add_subcommand("serve", "Answer JSON requests (one per line) on standard input");
  serve->add_option("--session", serve_session, "Session file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (*info) {
    const ChromatinModel m = load_model(model_path, resolution);
    out << "model: " << m.name() << "\n";
    out << "bins: " << m.size() << ", parts: " << m.parts().size() << "\n";
    out << "resolution_bp: " << m.resolution_bp() << "\n";
    for (const auto& p : m.parts())
      out << "part " << p.name << ": bins " << p.bins.first << "-" << p.bins.last << " (" << p.bins.size() << ")\n";
    if (m.size() > m.parts().size()) {
      const auto spacings = inter_bin_spacings(m);
      const auto h = tukey_hinges(spacings);
      const auto r = estimate_tube_radius(spacings);
      out << "spacing: q1 " << text::format_double(h.q1) << ", median " << text::format_double(h.median) << ", q3 "
          << text::format_double(h.q3) << ", iqr " << text::format_double(h.iqr()) << "\n";
      out << "radius: lower " << text::format_double(r.lower) << ", default " << text::format_double(r.default_radius)
          << ", upper " << text::format_double(r.upper) << "\n";
    } else {
      out << "spacing: none (every part holds one bin)\n";
    }
    return kExitOk;
  }

  if (*genome) {
    std::vector<PartLength> parts;
    text::for_each_line(text::read_file(lengths_path), [&](std::size_t line_no, std::string_view line) {
      line = text::trim(line);
      if (line.empty() || line.front() == '#') return;
      const auto f = text::split_any(line, "\t ");
      const auto len = f.size() == 2 ? text::parse_int(f[1]) : std::nullopt;
      if (!len || *len < 0) throw ParseError(line_no, "expected 'name<TAB>length'");
      parts.push_back({std::string(f[0]), *len});
    });
    std::int64_t total = 0;
    for (const auto& p : parts) total += p.length_bp;
    out << "parts: " << parts.size() << "\n";
    out << "total_bp: " << total << "\n";
    out << "resolution_bp: " << genome_res << "\n";
    out << "bins: " << bins_for_genome(parts, genome_res) << "\n";
    return kExitOk;
  }

  if (*init) {
    load_model(model_path, resolution);  // fail early on a bad model
    const fs::path base = dir_of(init_out);
    Session s = minimal_session(model_path, resolution, base);
    s.seed = init_seed;
    auto add_tracks = [&](const std::vector<std::string>& paths, TrackKind kind) {
      for (const auto& p : paths) {
        load_bed(p);
        TrackRef t;
        t.name = fs::path(p).stem().string();
        t.kind = kind;
        t.path = relative_to(p, base);
        t.model = "main";
        s.tracks.push_back(std::move(t));
      }
    };
    add_tracks(signals, TrackKind::signal);
    add_tracks(segmentations, TrackKind::segmentation);
    add_tracks(marker_files, TrackKind::markers);
    s.render.color_track = color_track;
    if (init_repr) s.render.representation = parse_representation(*init_repr);
    save_session(s, init_out);
    out << "session: " << init_out << "\n";
    return kExitOk;
  }

  if (*rend) return cmd_render(ro, err);

  if (*distmap) {
    if (dm_format == "png" && (dm_out.empty() || dm_out == "-")) throw UsageError("PNG output needs --out");
    DistanceTile tile;
    if (dm_selection) {
      if (dm_session.empty()) throw UsageError("--selection needs --session");
      const LoadedSession loaded = load_session_data(load_session(dm_session), dir_of(dm_session));
      tile = distance_map_for_selection(loaded.raw, loaded.selections.get(*dm_selection).bins, level).tile;
    } else {
      if (model_path.empty()) throw UsageError("distmap needs --model (or --session with --selection)");
      const ChromatinModel m = load_model(model_path, resolution);
      const MergedBins merged = merge_bins(m, level);
      BinRange rows{0, merged.positions.size() - 1};
      BinRange cols = rows;
      if (!dm_region.empty()) rows = cols = merged_range_for(merged, genomic_to_bins(m, parse_region(dm_region)).range);
      if (!dm_rows.empty()) rows = parse_index_range(dm_rows);
      if (!dm_cols.empty()) cols = parse_index_range(dm_cols);
      tile = distance_tile(merged, rows, cols);
    }
    if (dm_format == "png") write_image(tile_image(tile), dm_out, ImageFormat::png);
    else emit(tile_tsv(tile), dm_out, out);
    return kExitOk;
  }

  if (*sasa) {
    const ChromatinModel m = load_model(model_path, resolution);
    double r = 0.0;
    if (bin_radius) {
      r = *bin_radius;
    } else {
      if (m.size() <= m.parts().size()) throw UsageError("model has no spacing to derive a radius from; pass --bin-radius");
      r = estimate_tube_radius(inter_bin_spacings(m)).default_radius;
    }
    SasaParams params = SasaParams::with_defaults(r);
    if (probe) params.probe_radius = *probe;
    params.sample_count = samples;
    std::optional<BinSet> subset;
    if (!subset_regions.empty()) {
      subset = BinSet(m.size());
      for (const auto& reg : subset_regions) {
        const auto range = genomic_to_bins(m, parse_region(reg)).range;
        for (BinIndex b = range.first; b <= range.last; ++b) subset->set(b);
      }
    }
    const SasaResult res = compute_sasa(m, params, subset);
    std::vector<BedRecord> records;
    for (std::size_t i = 0; i < res.bins.size(); ++i) {
      const auto g = bin_to_genomic(m, res.bins[i]);
      BedRecord rec;
      rec.chrom = g.part;
      rec.start_bp = g.start_bp;
      rec.end_bp = g.end_bp;
      rec.name = "bin" + std::to_string(res.bins[i]);
      rec.score = res.values[i];
      rec.score_text = text::format_double(res.values[i]);
      records.push_back(std::move(rec));
    }
    emit(serialize_bed(records), sasa_out, out);
    return kExitOk;
  }

  if (*select) {
    Session s = load_session(sel_session);
    LoadedSession loaded = load_session_data(s, dir_of(sel_session));
    const ChromatinModel& m = loaded.raw;
    SelectionSet& set = loaded.selections;
    const std::string seed_text = "selections:" + std::to_string(s.seed);
    std::optional<Rgb> color;
    if (!sel_color.empty()) color = parse_hex_color(sel_color);
    auto bin_arg = [&](std::size_t i) {
      if (sel_args[i] < 0) throw UsageError("bin indices must be non-negative");
      return static_cast<BinIndex>(sel_args[i]);
    };
    SelectionId id = 0;
    if (tool == "point") {
      if (sel_args.size() != 1) throw UsageError("point takes exactly one bin index");
      const PointMode mode = sel_remove ? PointMode::remove : PointMode::add;
      if (sel_into) {
        Selection& target = set.get(*sel_into);
        target.bins = select_point(target.bins, bin_arg(0), mode);
        id = target.id;
      } else {
        if (sel_remove) throw UsageError("--remove needs --into");
        id = set.add(sel_name.empty() ? "point" : sel_name, select_point(BinSet(m.size()), bin_arg(0)), color, seed_text);
      }
    } else if (tool == "sphere") {
      if (!sel_radius) throw UsageError("sphere needs --radius");
      if (sel_bin.has_value() == !sel_center.empty()) throw UsageError("sphere needs exactly one of --bin or --center");
      const BinSet bins = sel_bin ? select_sphere(m, *sel_bin, *sel_radius)
                                  : select_sphere(m, parse_point(sel_center), *sel_radius);
      id = set.add(sel_name.empty() ? "sphere" : sel_name, bins, color, seed_text);
    } else {
      if (sel_args.size() != 2) throw UsageError("sequence takes exactly two bin indices");
      const BinRange range = select_sequence(bin_arg(0), bin_arg(1), m.size());
      id = set.add(sel_name.empty() ? "sequence" : sel_name, BinSet::from_range(m.size(), range), color, seed_text);
    }
    store_selections(s, set, s.models.front().id);
    save_session(s, sel_out.empty() ? sel_session : sel_out);
    const Selection& made = set.get(id);
    out << "selection " << made.id << " (" << made.name << "): " << made.bins.count() << " bins, color "
        << to_hex(made.color) << "\n";
    return kExitOk;
  }

  if (*serve) {
    ProtocolServer server(load_session_data(load_session(serve_session), dir_of(serve_session)));
    server.serve(in, out);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
  try {
    return run(argc, argv, out, err, in);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(argc, argv, out, err, std::cin);
}

}  // namespace skein
