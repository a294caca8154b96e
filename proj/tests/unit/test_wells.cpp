#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "adapod/errors.hpp"
#include "adapod/wells.hpp"
#include "oracles.hpp"

using namespace adapod;

namespace {

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

ReservoirModel homogeneous(int nx, int ny, double lx, double ly, double k = 1e-13) {
    const Grid g = build_grid(nx, ny, lx, ly);
    return make_model(g, std::vector<double>(g.cells(), 0.2), std::vector<double>(g.cells(), k), {});
}

}  // namespace

TEST(Rasterize, HorizontalSegmentThroughCellCentre) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const auto cells = rasterize_well_segment(g, {512.5, 512.5}, 0.0, 150.0);
    const oracle::GridSpec spec{40, 40, 25.0, 25.0};
    EXPECT_EQ(as_set(cells), oracle::sampled_cells(spec, 437.5, 512.5, 587.5, 512.5));
    ASSERT_EQ(cells.size(), 7u);
    for (int c : cells) EXPECT_EQ(g.row(c), 20);
}

TEST(Rasterize, ZeroLengthIsContainingCell) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const auto cells = rasterize_well_segment(g, {333.0, 777.0}, 17.0, 0.0);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0], g.cell_at({333.0, 777.0}));
}

TEST(Rasterize, OppositeAzimuthGivesSameCells) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    auto a = rasterize_well_segment(g, {512.5, 512.5}, 63.0, 150.0);
    auto b = rasterize_well_segment(g, {512.5, 512.5}, 243.0, 150.0);
    EXPECT_EQ(as_set(a), as_set(b));
    std::reverse(b.begin(), b.end());
    EXPECT_EQ(a, b);
}

TEST(Rasterize, OrderedAlongSegmentWithoutDuplicates) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const auto cells = rasterize_well_segment(g, {500.0, 480.0}, 37.0, 300.0);
    EXPECT_EQ(as_set(cells).size(), cells.size());
    const auto [a, b] = segment_endpoints({500.0, 480.0}, 37.0, 300.0);
    double prev = -1.0;
    for (int c : cells) {
        const Point p = g.center(c);
        const double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (300.0 * 300.0);
        EXPECT_GE(t, prev - 0.05);
        prev = t;
    }
}

TEST(Rasterize, LeavingTheDomainThrows) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    EXPECT_THROW(rasterize_well_segment(g, {20.0, 500.0}, 0.0, 150.0), OutOfDomain);
    EXPECT_THROW(rasterize_well_segment(g, {500.0, 990.0}, 90.0, 100.0), OutOfDomain);
}

TEST(Rasterize, AzimuthIsClockwiseFromHorizontal) {
    const auto [a, b] = segment_endpoints({0.0, 0.0}, 90.0, 2.0);
    EXPECT_NEAR(a.x, 0.0, 1e-12);
    EXPECT_NEAR(b.x, 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.y - b.y), 2.0, 1e-12);
}

// The supercover must contain every cell the segment crosses with positive
// length, and nothing the segment does not touch at all. Point sampling at
// 0.1 m is a subset of the former on non-degenerate segments.
TEST(Rasterize, MatchesPointSamplingAndClippingOracles) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const oracle::GridSpec spec{40, 40, 25.0, 25.0};
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(200.0, 800.0), az(0.0, 360.0), len(0.0, 300.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Point c{pos(rng), pos(rng)};
        const double a = az(rng), l = len(rng);
        const auto cells = as_set(rasterize_well_segment(g, c, a, l));
        const auto [p0, p1] = segment_endpoints(c, a, l);
        const auto sampled = oracle::sampled_cells(spec, p0.x, p0.y, p1.x, p1.y);
        for (int s : sampled) EXPECT_TRUE(cells.count(s)) << "trial " << trial << " misses sampled cell " << s;
        for (int row = 0; row < 40; ++row)
            for (int col = 0; col < 40; ++col) {
                const double inside = oracle::clipped_length(spec, row, col, p0.x, p0.y, p1.x, p1.y);
                const int idx = row * 40 + col;
                if (inside > 1e-6) {
                    EXPECT_TRUE(cells.count(idx)) << "trial " << trial << " misses crossed cell " << idx;
                } else if (inside < 0.0) {
                    EXPECT_FALSE(cells.count(idx)) << "trial " << trial << " includes untouched cell " << idx;
                }
            }
    }
}

TEST(Peaceman, WellIndexFormula) {
    const auto m = homogeneous(40, 40, 1000.0, 1000.0, 2e-13);
    EXPECT_NEAR(peaceman_well_index(m, 5), 2.0 * std::numbers::pi * 2e-13 / std::log(0.2 * 25.0 / 0.1), 1e-25);
}

TEST(WellConfiguration, BuildsPerforationsAndValidatesPressures) {
    const auto m = homogeneous(40, 40, 1000.0, 1000.0);
    std::vector<Injector> inj;
    for (int c : corner_cells(m.grid)) inj.push_back({c, 300e5});
    const Producer prod{{{512.5, 512.5}, 0.0, 150.0}, 100e5};
    const auto w = make_well_configuration(m, inj, prod);
    ASSERT_EQ(w.producer_cells.size(), 7u);
    for (const auto& p : w.producer_cells) EXPECT_DOUBLE_EQ(p.well_index, peaceman_well_index(m, p.cell));

    inj[2].bhp = 90e5;
    EXPECT_THROW(make_well_configuration(m, inj, prod), InvalidArgument);
}

TEST(WellConfiguration, CornerCells) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    EXPECT_EQ(as_set(corner_cells(g)), (std::set<int>{0, 39, 1560, 1599}));
}

TEST(WellConfiguration, ReplacingGeometryIsDeterministic) {
    const auto m = homogeneous(40, 40, 1000.0, 1000.0);
    std::vector<Injector> inj;
    for (int c : corner_cells(m.grid)) inj.push_back({c, 300e5});
    const auto w = make_well_configuration(m, inj, {{{512.5, 512.5}, 63.0, 150.0}, 100e5});
    const auto a = with_producer_geometry(m, w, {{512.5, 512.5}, 175.0, 150.0});
    const auto b = with_producer_geometry(m, w, {{512.5, 512.5}, 175.0, 150.0});
    ASSERT_EQ(a.producer_cells.size(), b.producer_cells.size());
    for (std::size_t i = 0; i < a.producer_cells.size(); ++i) EXPECT_EQ(a.producer_cells[i].cell, b.producer_cells[i].cell);
    EXPECT_NE(as_set(rasterize_well_segment(m.grid, {512.5, 512.5}, 63.0, 150.0)),
              as_set(rasterize_well_segment(m.grid, {512.5, 512.5}, 175.0, 150.0)));
}
