#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "namo/costmap.hpp"
#include "namo/planner.hpp"
#include "oracles/inflation.hpp"

using namespace namo;

namespace {

const GridGeometry kGrid20{20, 20, 0.05, {}};

ObjectClass box() { return ClassTable::defaults().at(kBoxCardboard); }
ObjectClass trolley() { return ClassTable::defaults().at(kFoodTrolley); }
ObjectClass vase() { return ClassTable::defaults().at(kVaseGlass); }

std::vector<GridIndex> block(int c0, int r0, int c1, int r1) {
  std::vector<GridIndex> out;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) out.push_back({c, r});
  return out;
}

struct RandomLayers {
  std::vector<GridIndex> statics;
  std::vector<std::tuple<int, ObjectClass, std::vector<GridIndex>>> objects;
};

RandomLayers random_layers(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> col(0, w - 1), row(0, h - 1), n(0, 6), len(1, 4);
  const auto classes = ClassTable::defaults();
  const std::vector<std::string> names = {"box_cardboard", "trash_can", "food_trolley", "vase_glass"};
  RandomLayers out;
  for (int i = n(rng); i > 0; --i) out.statics.push_back({col(rng), row(rng)});
  for (int id = 1, m = n(rng); id <= m; ++id) {
    const int c = col(rng), r = row(rng);
    out.objects.emplace_back(id, classes.at(names[static_cast<std::size_t>(id * 7 + c) % names.size()]),
                             block(c, r, std::min(w - 1, c + len(rng)), std::min(h - 1, r + len(rng))));
  }
  return out;
}

void apply(LayeredCostmap& map, const RandomLayers& l) {
  map.set_static(l.statics);
  for (const auto& [id, cls, cells] : l.objects) map.upsert_object(id, cls, cells);
  map.inflate_and_compose();
}

}  // namespace

TEST(Costmap, StartsFree) {
  LayeredCostmap map(kGrid20, 0.25);
  map.inflate_and_compose();
  for (const CostCell& c : map.composed_cells()) EXPECT_EQ(c, CostCell{});
}

TEST(Costmap, EmptyStaticSetChangesNothing) {
  LayeredCostmap map(kGrid20, 0.25);
  map.set_static({});
  map.inflate_and_compose();
  EXPECT_EQ(map.composed({5, 5}).cost, 0);
}

TEST(Costmap, SingleStaticCellIsFatalBeforeInflation) {
  LayeredCostmap map(kGrid20, 0.0);
  const std::vector<GridIndex> one = {{3, 4}};
  map.set_static(one);
  EXPECT_TRUE(map.raw({3, 4}).fatal());
  EXPECT_EQ(map.raw({3, 4}).source, CellSource::Static);
  EXPECT_FALSE(map.raw({4, 4}).fatal());
}

TEST(Costmap, StaticOutOfBoundsThrowsAndLeavesMapUntouched) {
  LayeredCostmap map(kGrid20, 0.0);
  const std::vector<GridIndex> cells = {{1, 1}, {20, 1}};
  EXPECT_THROW(map.set_static(cells), OutOfBoundsError);
  EXPECT_FALSE(map.raw({1, 1}).fatal());
}

TEST(Costmap, UpsertBoxCarriesCostAndId) {
  LayeredCostmap map(kGrid20, 0.0);
  map.upsert_object(1, box(), block(2, 2, 3, 3));
  map.inflate_and_compose();
  int count = 0;
  for (const CostCell& c : map.composed_cells()) {
    if (c.cost != 0) {
      ++count;
      EXPECT_EQ(c.cost, 10);
      EXPECT_EQ(c.object_id, 1);
      EXPECT_EQ(c.source, CellSource::MovableObject);
    }
  }
  EXPECT_EQ(count, 4);
}

TEST(Costmap, UnmovableClassIsFatal) {
  LayeredCostmap map(kGrid20, 0.0);
  map.upsert_object(3, vase(), block(5, 5, 6, 6));
  map.inflate_and_compose();
  EXPECT_TRUE(map.composed({5, 5}).fatal());
  EXPECT_EQ(map.composed({5, 5}).source, CellSource::UnmovableObject);
  EXPECT_EQ(map.composed({5, 5}).object_id, 3);
}

TEST(Costmap, ReupsertMovesObject) {
  LayeredCostmap map(kGrid20, 0.0);
  map.upsert_object(1, box(), block(2, 2, 3, 3));
  map.upsert_object(1, box(), block(4, 2, 5, 3));
  map.inflate_and_compose();
  EXPECT_EQ(map.composed({2, 2}).cost, 0);
  EXPECT_EQ(map.composed({5, 3}).cost, 10);
  EXPECT_EQ(map.object_cells(1).size(), 4u);
}

TEST(Costmap, MarkUnmovable) {
  LayeredCostmap map(kGrid20, 0.0);
  EXPECT_THROW(map.mark_object_unmovable(2), UnknownObjectError);
  map.upsert_object(2, box(), block(2, 2, 3, 3));
  map.mark_object_unmovable(2);
  map.inflate_and_compose();
  EXPECT_TRUE(map.composed({2, 2}).fatal());
  EXPECT_TRUE(map.is_marked_unmovable(2));
  // Sticky across later updates of the same object.
  map.upsert_object(2, box(), block(6, 6, 7, 7));
  map.inflate_and_compose();
  EXPECT_TRUE(map.composed({6, 6}).fatal());
  EXPECT_EQ(map.composed({2, 2}).cost, 0);
}

TEST(Costmap, MarkUnmovableIsIdempotent) {
  LayeredCostmap map(kGrid20, 0.1);
  map.upsert_object(3, vase(), block(5, 5, 6, 6));
  map.inflate_and_compose();
  const auto before = map.composed_cells();
  map.mark_object_unmovable(3);
  map.mark_object_unmovable(3);
  map.inflate_and_compose();
  EXPECT_EQ(map.composed_cells(), before);
}

TEST(Costmap, MarkedObjectIsAvoidedByPlanner) {
  // A wall across the grid with a box plugging the only gap.
  LayeredCostmap map(kGrid20, 0.0);
  std::vector<GridIndex> wall;
  for (int r = 0; r < 20; ++r)
    if (r != 10) wall.push_back({10, r});
  map.set_static(wall);
  map.upsert_object(1, box(), {{GridIndex{10, 10}}});
  map.inflate_and_compose();
  const PlanResult through = plan_astar(map, GridIndex{2, 10}, GridIndex{17, 10});
  ASSERT_TRUE(through.ok());
  EXPECT_EQ(through.path.crossed_objects, std::vector<int>{1});
  map.mark_object_unmovable(1);
  map.inflate_and_compose();
  EXPECT_EQ(plan_astar(map, GridIndex{2, 10}, GridIndex{17, 10}).status, PlanStatus::NoPath);
}

TEST(Inflation, SingleFatalCellSpreadsToRadius) {
  LayeredCostmap map({41, 41, 0.05, {}}, 0.3);
  const std::vector<GridIndex> one = {{20, 20}};
  map.set_static(one);
  map.inflate_and_compose();
  for (int r = 0; r < 41; ++r) {
    for (int c = 0; c < 41; ++c) {
      const int d2 = (c - 20) * (c - 20) + (r - 20) * (r - 20);
      EXPECT_EQ(map.composed({c, r}).fatal(), d2 <= 36) << c << "," << r;
    }
  }
}

TEST(Inflation, ZeroRadiusEqualsRawLayers) {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    LayeredCostmap map(kGrid20, 0.0);
    apply(map, random_layers(rng, 20, 20));
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c) EXPECT_EQ(map.composed({c, r}), map.raw({c, r}));
  }
}

TEST(Inflation, MovableNextToFatalOverlapIsFatal) {
  LayeredCostmap map(kGrid20, 0.15);
  const std::vector<GridIndex> wall = {{10, 10}};
  map.set_static(wall);
  map.upsert_object(1, box(), {{GridIndex{12, 10}}});
  map.inflate_and_compose();
  EXPECT_TRUE(map.composed({11, 10}).fatal());
  EXPECT_TRUE(map.composed({13, 10}).fatal());  // 3 cells from the wall
  EXPECT_EQ(map.composed({15, 10}).cost, 10);
  EXPECT_EQ(map.composed({15, 10}).object_id, 1);
  EXPECT_EQ(map.composed({15, 10}).source, CellSource::Inflation);
  EXPECT_EQ(map.composed({16, 10}).cost, 0);
}

TEST(Inflation, NearestMovableSourceWinsTiesToLowerId) {
  LayeredCostmap map(kGrid20, 0.2);
  map.upsert_object(5, trolley(), {{GridIndex{4, 10}}});
  map.upsert_object(2, box(), {{GridIndex{8, 10}}});
  map.inflate_and_compose();
  EXPECT_EQ(map.composed({6, 10}).object_id, 2);  // equidistant
  EXPECT_EQ(map.composed({5, 10}).object_id, 5);
  EXPECT_EQ(map.composed({5, 10}).cost, 40);
  EXPECT_EQ(map.composed({7, 10}).cost, 10);
}

TEST(InflationProperty, MatchesBruteForceOracle) {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 40; ++trial) {
    const double radius = 0.05 * (trial % 5);
    LayeredCostmap map(kGrid20, radius);
    apply(map, random_layers(rng, 20, 20));
    std::vector<oracle::RawCell> raw(400);
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 20; ++c) {
        const CostCell x = map.raw({c, r});
        raw[r * 20 + c] = {x.fatal(), x.fatal() ? 0 : x.object_id.value_or(0), x.fatal() ? 0 : x.cost};
      }
    }
    const auto want = oracle::inflate(raw, 20, 20, radius / 0.05);
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 20; ++c) {
        const CostCell& got = map.composed({c, r});
        const auto& w = want[r * 20 + c];
        EXPECT_EQ(got.cost, w.cost) << c << "," << r;
        if (!got.fatal()) EXPECT_EQ(got.object_id.value_or(0), w.id) << c << "," << r;
      }
    }
  }
}

TEST(InflationProperty, ComposedNeverBelowRaw) {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    LayeredCostmap map(kGrid20, 0.05 * (trial % 6));
    apply(map, random_layers(rng, 20, 20));
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c) {
        EXPECT_GE(map.composed({c, r}).cost, map.raw({c, r}).cost);
        if (map.raw({c, r}).fatal()) EXPECT_TRUE(map.composed({c, r}).fatal());
      }
  }
}

TEST(InflationProperty, CompositionIsOrderIndependent) {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomLayers l = random_layers(rng, 20, 20);
    LayeredCostmap a(kGrid20, 0.1);
    apply(a, l);
    RandomLayers shuffled = l;
    std::shuffle(shuffled.objects.begin(), shuffled.objects.end(), rng);
    LayeredCostmap b(kGrid20, 0.1);
    for (const auto& [id, cls, cells] : shuffled.objects) b.upsert_object(id, cls, cells);
    b.set_static(shuffled.statics);
    b.inflate_and_compose();
    EXPECT_EQ(a.composed_cells(), b.composed_cells());
  }
}

TEST(InflationProperty, RepeatedUpsertIsIdempotent) {
  std::mt19937 rng(71);
  const RandomLayers l = random_layers(rng, 20, 20);
  LayeredCostmap map(kGrid20, 0.1);
  apply(map, l);
  const auto before = map.composed_cells();
  for (const auto& [id, cls, cells] : l.objects) map.upsert_object(id, cls, cells);
  map.inflate_and_compose();
  EXPECT_EQ(map.composed_cells(), before);
}

TEST(CellAt, FloorArithmeticAndBounds) {
  LayeredCostmap map({40, 40, 0.05, {}}, 0.0);
  map.inflate_and_compose();
  EXPECT_EQ(map.cell_at({0.0, 0.0}).second, (GridIndex{0, 0}));
  EXPECT_EQ(map.cell_at({1.02, 0.51}).second, (GridIndex{20, 10}));
  EXPECT_THROW(map.cell_at({-0.1, 0.5}), OutOfBoundsError);
  EXPECT_THROW(map.cell_at({0.5, 2.0}), OutOfBoundsError);
}

TEST(CostmapDump, PgmAndObjectTable) {
  LayeredCostmap map({3, 2, 0.05, {}}, 0.0);
  const std::vector<GridIndex> wall = {{0, 0}};
  map.set_static(wall);
  map.upsert_object(4, box(), {{GridIndex{2, 1}}});
  map.inflate_and_compose();
  std::ostringstream pgm;
  write_costmap_pgm(map, pgm);
  const std::string s = pgm.str();
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(s.substr(0, header.size()), header);
  const std::string px = s.substr(header.size());
  ASSERT_EQ(px.size(), 6u);
  // Row 0 of the image is the top grid row.
  EXPECT_EQ(static_cast<unsigned char>(px[2]), 255 - 10);
  EXPECT_EQ(static_cast<unsigned char>(px[3]), 0);
  EXPECT_EQ(static_cast<unsigned char>(px[4]), 255);

  std::ostringstream table;
  write_object_table(map, table);
  EXPECT_EQ(table.str(), "4 box_cardboard movable 1 2,1\n");
}
