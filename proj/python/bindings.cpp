#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "skein/analysis.hpp"
#include "skein/cli.hpp"
#include "skein/error.hpp"
#include "skein/renderer.hpp"
#include "skein/selections.hpp"
#include "skein/session.hpp"

namespace py = pybind11;
using namespace skein;

namespace {

py::array_t<double> positions(const ChromatinModel& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.size()), py::ssize_t{3}});
  auto v = out.mutable_unchecked<2>();
  for (BinIndex i = 0; i < m.size(); ++i)
    for (int k = 0; k < 3; ++k) v(i, k) = m.bin(i)[k];
  return out;
}

py::array_t<double> tile_array(const DistanceTile& t) {
  py::array_t<double> out({static_cast<py::ssize_t>(t.row_count()), static_cast<py::ssize_t>(t.col_count())});
  std::copy(t.values.begin(), t.values.end(), out.mutable_data());
  return out;
}

BinSet bins_from(const ChromatinModel& m, const std::vector<BinIndex>& idx) { return BinSet::from_indices(m.size(), idx); }

double default_radius(const ChromatinModel& normalized) {
  const auto s = inter_bin_spacings(normalized);
  return s.empty() ? 0.05 : estimate_tube_radius(s).default_radius;
}

py::array_t<std::uint8_t> render_model(const ChromatinModel& model, int width, int height,
                                       const std::string& representation, std::optional<double> radius, bool ssao,
                                       std::uint64_t seed, int samples) {
  const ChromatinModel norm = normalize_model(model);
  const double r = radius.value_or(default_radius(norm));
  SceneDescription d;
  d.primitives = build_representation(norm, parse_representation(representation), r);
  d.bin_count = norm.size();
  const Scene scene(std::move(d));
  const Camera cam = Camera::framing(scene.bounds(), width, height);
  RenderSettings settings;
  if (ssao) {
    SsaoSettings s;
    s.radius_far = 0.25;
    s.radius_near = 4.0 * r < s.radius_far ? 4.0 * r : 0.5 * s.radius_far;
    s.samples_per_pixel = samples;
    s.seed = seed;
    settings.ssao = s;
  }
  Image img;
  {
    py::gil_scoped_release release;
    img = render(scene, cam, settings).image;
  }
  py::array_t<std::uint8_t> out({py::ssize_t{img.height}, py::ssize_t{img.width}, py::ssize_t{3}});
  std::copy(img.rgb.begin(), img.rgb.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_skein, m) {
  m.doc() = "Chromatin model analysis and rendering";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<OutOfRange>(m, "OutOfRange", PyExc_IndexError);

  py::class_<ChromatinModel>(m, "Model")
      .def_property_readonly("name", &ChromatinModel::name)
      .def_property_readonly("resolution_bp", &ChromatinModel::resolution_bp)
      .def_property_readonly("positions", &positions)
      .def_property_readonly("parts",
                             [](const ChromatinModel& self) {
                               py::list out;
                               for (const auto& p : self.parts())
                                 out.append(py::make_tuple(p.name, p.bins.first, p.bins.last, p.offset_bp));
                               return out;
                             })
      .def("__len__", &ChromatinModel::size)
      .def("spacings", &inter_bin_spacings)
      .def("serialize", &serialize_model)
      .def("normalized", &normalize_model)
      .def("__repr__", [](const ChromatinModel& self) {
        return "<Model " + self.name() + ": " + std::to_string(self.size()) + " bins, " +
               std::to_string(self.parts().size()) + " parts>";
      });

  m.def("load_model", &load_model, py::arg("path"), py::arg("resolution_bp") = 1);
  m.def("parse_model", &parse_model, py::arg("text"), py::arg("name") = "model", py::arg("resolution_bp") = 1);

  m.def(
      "tube_radius",
      [](const std::vector<double>& spacings) {
        const auto r = estimate_tube_radius(spacings);
        return py::dict(py::arg("lower") = r.lower, py::arg("default") = r.default_radius, py::arg("upper") = r.upper);
      },
      py::arg("spacings"), "Lower, default and upper tube radius from inter-bin spacings");

  m.def("bins_for_length", &bins_for_length, py::arg("length_bp"), py::arg("resolution_bp"));

  m.def(
      "distance_map", [](const ChromatinModel& model, int level) { return tile_array(distance_map(model, level)); },
      py::arg("model"), py::arg("level") = 0);
  m.def(
      "distance_tile",
      [](const ChromatinModel& model, int level, std::pair<BinIndex, BinIndex> rows, std::pair<BinIndex, BinIndex> cols) {
        return tile_array(distance_tile(model, level, {rows.first, rows.second}, {cols.first, cols.second}));
      },
      py::arg("model"), py::arg("level"), py::arg("rows"), py::arg("cols"));
  m.def("level_for", &level_for, py::arg("bins"), py::arg("tile_size") = kTileSize);

  m.def(
      "sasa",
      [](const ChromatinModel& model, double bin_radius, std::optional<double> probe_radius, int samples,
         std::optional<std::vector<BinIndex>> subset) {
        SasaParams p = SasaParams::with_defaults(bin_radius);
        if (probe_radius) p.probe_radius = *probe_radius;
        p.sample_count = samples;
        std::optional<BinSet> sub;
        if (subset) sub = bins_from(model, *subset);
        SasaResult r;
        {
          py::gil_scoped_release release;
          r = compute_sasa(model, p, sub);
        }
        return py::make_tuple(r.bins, r.values);
      },
      py::arg("model"), py::arg("bin_radius"), py::arg("probe_radius") = py::none(), py::arg("samples") = 960,
      py::arg("subset") = py::none(), "Per-bin accessible surface area: (bins, values)");

  m.def(
      "select_sphere",
      [](const ChromatinModel& model, BinIndex center, double radius) {
        return select_sphere(model, center, radius).indices();
      },
      py::arg("model"), py::arg("center_bin"), py::arg("radius"));
  m.def(
      "select_sphere_at",
      [](const ChromatinModel& model, std::array<double, 3> c, double radius) {
        return select_sphere(model, Vec3{c[0], c[1], c[2]}, radius).indices();
      },
      py::arg("model"), py::arg("center"), py::arg("radius"));
  m.def(
      "select_sequence",
      [](BinIndex a, BinIndex b, std::size_t n) {
        const auto r = select_sequence(a, b, n);
        return py::make_tuple(r.first, r.last);
      },
      py::arg("a"), py::arg("b"), py::arg("bin_count"));

  m.def("render_model", &render_model, py::arg("model"), py::arg("width") = 512, py::arg("height") = 512,
        py::arg("representation") = "smooth_tube", py::arg("radius") = py::none(), py::arg("ssao") = true,
        py::arg("seed") = 1, py::arg("samples") = 16, "Render to an (height, width, 3) uint8 array");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& input) {
        std::vector<std::string> full{"skein"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        std::istringstream in(input);
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err, in);
        }
        return py::make_tuple(code, py::bytes(out.str()), py::bytes(err.str()));
      },
      py::arg("args"), py::arg("input") = "", "Run a CLI command in process: (exit code, stdout, stderr)");
}
