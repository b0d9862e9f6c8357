#include <doctest.h>

#include <random>

#include "skein/error.hpp"
#include "skein/selections.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/truth_tables.hpp"

using namespace skein;

namespace {

ChromatinModel three_in_a_row() { return ChromatinModel("r", {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {}, 10); }

}  // namespace

TEST_CASE("bin sets") {
  BinSet s(130);
  s.set(0);
  s.set(64);
  s.set(129);
  CHECK(s.count() == 3);
  CHECK(s.indices() == std::vector<BinIndex>{0, 64, 129});
  CHECK_THROWS_AS(s.set(130), OutOfRange);
  CHECK_FALSE(s.test(500));
  s.reset(64);
  CHECK(s.count() == 2);

  const auto r = BinSet::from_range(130, {60, 70});
  CHECK(r.count() == 11);
  CHECK((r | s).count() == 13);
  CHECK((r & s).empty());
  const std::vector<BinIndex> idx{3, 5};
  CHECK(BinSet::from_indices(10, idx).indices() == idx);
}

TEST_CASE("point selection") {
  BinSet s(10);
  s = select_point(s, 7);
  CHECK(s.indices() == std::vector<BinIndex>{7});
  s = select_point(s, 7);
  CHECK(s.indices() == std::vector<BinIndex>{7});
  s = select_point(s, 7, PointMode::remove);
  CHECK(s.empty());
  CHECK_THROWS_AS(select_point(s, 10), OutOfRange);
}

TEST_CASE("sphere selection examples") {
  const auto m = three_in_a_row();
  CHECK(select_sphere(m, BinIndex{0}, 1.5).indices() == std::vector<BinIndex>{0, 1});
  CHECK(select_sphere(m, BinIndex{1}, 0.1).indices() == std::vector<BinIndex>{1});
  CHECK(select_sphere(m, BinIndex{0}, 1.0).indices() == std::vector<BinIndex>{0, 1});  // boundary included
  CHECK(select_sphere(m, Vec3{5, 5, 5}, 1.0).empty());
  CHECK_THROWS_AS(select_sphere(m, BinIndex{0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(select_sphere(m, BinIndex{3}, 1.0), OutOfRange);
}

TEST_CASE("sphere selection equals the distance scan") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.1, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = synth::scatter(200 + rng() % 800, rng(), 5.0);
    const double r = u(rng);
    if (trial % 2) {
      const BinIndex c = rng() % m.size();
      CHECK(select_sphere(m, c, r).indices() == oracle::sphere_scan(m, m.bin(c), r));
    } else {
      const Vec3 c{u(rng) - 3, u(rng) - 3, u(rng) - 3};
      CHECK(select_sphere(m, c, r).indices() == oracle::sphere_scan(m, c, r));
    }
  }
}

TEST_CASE("sequence selection") {
  CHECK(select_sequence(5, 2, 10) == BinRange{2, 5});
  CHECK(select_sequence(3, 3, 10) == BinRange{3, 3});
  CHECK(select_sequence(0, 9, 10) == BinRange{0, 9});  // crosses any part boundary
  CHECK_THROWS_AS(select_sequence(0, 10, 10), OutOfRange);
}

TEST_CASE("selection set bookkeeping") {
  SelectionSet set(10);
  const auto a = set.add("a", BinSet(10));
  const auto b = set.add("b", BinSet(10), Rgb{1, 2, 3});
  CHECK(a != b);
  CHECK(set.get(b).color == Rgb{1, 2, 3});
  CHECK(set.get(a).order < set.get(b).order);
  CHECK_THROWS_AS(set.add("c", BinSet(9)), InvalidArgument);
  set.remove(a);
  CHECK_FALSE(set.contains(a));
  CHECK_THROWS_AS(set.remove(a), InvalidArgument);
  CHECK_THROWS_AS(set.get(a), InvalidArgument);

  // ids and orders are never reused
  const auto c = set.add("c", BinSet(10));
  CHECK(c > b);

  Selection dup = set.get(b);
  CHECK_THROWS_AS(set.restore(dup), InvalidArgument);
  SelectionSet fresh(10);
  Selection s1 = set.get(c);
  Selection s0 = set.get(b);
  fresh.restore(s0);
  CHECK_THROWS_AS(fresh.restore(s0), InvalidArgument);
  fresh.restore(s1);
  CHECK(fresh.next_id() > s1.id);
  SelectionSet bad(10);
  bad.restore(s1);
  CHECK_THROWS_AS(bad.restore(s0), InvalidArgument);  // older order after newer

  // default colors come from the seed and creation index
  SelectionSet x(10), y(10);
  CHECK(x.get(x.add("a", BinSet(10), std::nullopt, "k")).color ==
        y.get(y.add("zzz", BinSet(10), std::nullopt, "k")).color);
}

TEST_CASE("color precedence") {
  SelectionSet set(4);
  const auto s1 = set.add("s1", BinSet::from_range(4, {0, 2}), Rgb{255, 0, 0});
  const auto s2 = set.add("s2", BinSet::from_range(4, {1, 3}), Rgb{0, 255, 0});
  const std::vector<Marker> none;
  CHECK(resolve_bin_color(1, std::nullopt, set, none).color == Rgb{0, 255, 0});
  CHECK(resolve_bin_color(0, std::nullopt, set, none).color == Rgb{255, 0, 0});

  const std::vector<Marker> markers{{{1, 1}, {9, 9, 9}, 3.0}};
  CHECK(resolve_bin_color(1, std::nullopt, set, markers) == BinAppearance{{9, 9, 9}, 3.0});

  set.get(s2).visible = false;
  CHECK(resolve_bin_color(3, Rgb{5, 5, 5}, set, none).color == Rgb{5, 5, 5});
  CHECK(resolve_bin_color(1, Rgb{5, 5, 5}, set, none).color == Rgb{255, 0, 0});
  set.get(s1).visible = false;
  CHECK(resolve_bin_color(1, std::nullopt, set, none).color == kNeutralGray);

  const std::vector<Marker> stacked{{{2, 2}, {1, 1, 1}, 2.0}, {{2, 2}, {2, 2, 2}, 4.0}};
  CHECK(resolve_bin_color(2, std::nullopt, set, stacked) == BinAppearance{{2, 2, 2}, 4.0});
}

TEST_CASE("precedence and visibility truth tables") {
  int rows = 0;
  CHECK(truth::precedence_mismatches(&rows) == 0);
  CHECK(rows == 64);
  CHECK(truth::visibility_mismatches(&rows) == 0);
  CHECK(rows == 32);
}

TEST_CASE("disjoint selections commute; hiding is local") {
  std::mt19937_64 rng(12);
  const std::size_t n = 200;
  for (int trial = 0; trial < 50; ++trial) {
    BinSet a(n), b(n), other(n);
    for (BinIndex i = 0; i < n; ++i) {
      const auto r = rng() % 4;
      if (r == 0) a.set(i);
      if (r == 1) b.set(i);
      if (rng() % 3 == 0) other.set(i);
    }
    std::vector<std::optional<Rgb>> base(n);
    for (BinIndex i = 0; i < n; i += 3) base[i] = Rgb{1, 1, 1};
    SelectionSet ab(n), ba(n);
    ab.add("o", other, Rgb{7, 7, 7});
    ba.add("o", other, Rgb{7, 7, 7});
    ab.add("a", a, Rgb{1, 0, 0});
    ab.add("b", b, Rgb{0, 1, 0});
    ba.add("b", b, Rgb{0, 1, 0});
    ba.add("a", a, Rgb{1, 0, 0});
    const auto before = resolve_all(ab, base, {});
    CHECK(before == resolve_all(ba, base, {}));

    SelectionSet hidden = ab;
    hidden.get(hidden.selections()[1].id).visible = false;  // hide "a"
    const auto after = resolve_all(hidden, base, {});
    for (BinIndex i = 0; i < n; ++i)
      if (!a.test(i)) CHECK(after[i] == before[i]);
  }
}

TEST_CASE("visibility") {
  const auto m = synth::globule(20, 2, 1);
  const auto chroms = segmentation_from_parts(m);
  SelectionSet set(m.size());
  std::vector<SegmentationTrack> tracks{chroms};
  const BinSet all = visible_bins(set, tracks);
  CHECK(all.count() == 20);

  tracks[0].segments[0].visible = false;
  auto v = visible_bins(set, tracks);
  for (BinIndex b = 0; b < 10; ++b) CHECK_FALSE(v.test(b));
  CHECK(v.count() == 10);
  tracks[0].segments[0].visible = true;
  CHECK(visible_bins(set, tracks) == all);

  // overlap of two tracks, one hidden: the overlap is hidden
  SegmentationTrack second;
  second.name = "x";
  second.visible = false;
  second.segments.push_back({"x", {8, 12}, {}, true});
  tracks.push_back(second);
  v = visible_bins(set, tracks);
  CHECK(v.count() == 15);
  CHECK_FALSE(v.test(10));

  const auto id = set.add("s", BinSet::from_range(20, {0, 1}));
  set.get(id).visible = false;
  CHECK(visible_bins(set, {}).count() == 18);
}

TEST_CASE("BED export and import") {
  const ChromatinModel m("m", std::vector<Vec3>(8), {{"chr1", {0, 3}, 0}, {"chr2", {4, 7}, 100}}, 10);
  BinSet bins(8);
  for (BinIndex b : {1u, 2u, 3u, 4u, 6u}) bins.set(b);
  Selection s;
  s.name = "loop";
  s.bins = bins;
  const auto recs = selection_to_bed(s, m);
  REQUIRE(recs.size() == 3);
  CHECK((recs[0].chrom == "chr1" && recs[0].start_bp == 10 && recs[0].end_bp == 40));
  CHECK((recs[1].chrom == "chr2" && recs[1].start_bp == 100 && recs[1].end_bp == 110));
  CHECK((recs[2].start_bp == 120 && recs[2].end_bp == 130));
  CHECK(recs[0].name == "loop");
  CHECK(bins_from_bed(recs, m) == bins);

  std::size_t skipped = 0;
  const auto extra = parse_bed("chrZ\t0\t10\nchr1\t500\t600\n");
  CHECK(bins_from_bed(extra, m, &skipped).empty());
  CHECK(skipped == 2);
}
