#include "adapod/wells.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adapod/errors.hpp"

namespace adapod {

std::pair<Point, Point> segment_endpoints(Point center, double azimuth_deg, double length) {
    const double a = azimuth_deg * std::numbers::pi / 180.0;
    const double ux = std::cos(a);
    const double uy = -std::sin(a);
    const double h = 0.5 * length;
    return {Point{center.x - h * ux, center.y - h * uy}, Point{center.x + h * ux, center.y + h * uy}};
}

namespace {

// Parametric distance (in t over [0, 1]) to the next grid line along one axis.
struct AxisWalk {
    int cell;
    int step;
    double t_next;
    double t_delta;
};

AxisWalk start_axis(double origin, double delta, double spacing, int cell) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (delta > 0.0) return {cell, 1, ((cell + 1) * spacing - origin) / delta, spacing / delta};
    if (delta < 0.0) return {cell, -1, (cell * spacing - origin) / delta, -spacing / delta};
    return {cell, 0, inf, inf};
}

// Forward steps may land exactly on t == 1 (endpoint on a grid line belongs to
// the next cell); backward steps at t == 1 stay in the current cell.
bool can_step(const AxisWalk& w) {
    if (w.step > 0) return w.t_next <= 1.0;
    if (w.step < 0) return w.t_next < 1.0;
    return false;
}

}  // namespace

std::vector<int> rasterize_well_segment(const Grid& grid, Point center, double azimuth_deg, double length) {
    if (length < 0.0) throw InvalidArgument("segment length must be non-negative");
    const auto [a, b] = segment_endpoints(center, azimuth_deg, length);
    if (!grid.contains(a) || !grid.contains(b)) throw OutOfDomain("well segment leaves the domain");

    const int start = grid.cell_at(a);
    std::vector<int> cells{start};
    if (length == 0.0) return cells;

    AxisWalk wx = start_axis(a.x, b.x - a.x, grid.dx, grid.col(start));
    AxisWalk wy = start_axis(a.y, b.y - a.y, grid.dy, grid.row(start));
    auto push = [&](int row, int col) {
        if (row < 0 || row >= grid.ny || col < 0 || col >= grid.nx) return;
        const int i = grid.index(row, col);
        if (std::find(cells.begin(), cells.end(), i) == cells.end()) cells.push_back(i);
    };

    while (can_step(wx) || can_step(wy)) {
        const bool step_x = can_step(wx);
        const bool step_y = can_step(wy);
        if (step_x && step_y && wx.t_next == wy.t_next) {
            // exact corner crossing: supercover keeps both side cells
            push(wy.cell, wx.cell + wx.step);
            push(wy.cell + wy.step, wx.cell);
            wx.cell += wx.step;
            wy.cell += wy.step;
            wx.t_next += wx.t_delta;
            wy.t_next += wy.t_delta;
        } else if (step_x && (!step_y || wx.t_next < wy.t_next)) {
            wx.cell += wx.step;
            wx.t_next += wx.t_delta;
        } else {
            wy.cell += wy.step;
            wy.t_next += wy.t_delta;
        }
        if (wx.cell >= grid.nx || wy.cell >= grid.ny || wx.cell < 0 || wy.cell < 0) break;
        push(wy.cell, wx.cell);
    }
    return cells;
}

double peaceman_well_index(const ReservoirModel& model, int cell) {
    const double re = 0.2 * model.grid.dx;
    return 2.0 * std::numbers::pi * model.permeability[static_cast<std::size_t>(cell)] * model.fluid.thickness /
           std::log(re / kWellboreRadius);
}

WellConfiguration make_well_configuration(const ReservoirModel& model, std::vector<Injector> injectors,
                                          Producer producer) {
    const Grid& g = model.grid;
    for (const auto& inj : injectors) {
        if (inj.cell < 0 || inj.cell >= g.cells()) throw OutOfDomain("injector cell outside grid");
        if (!(inj.bhp > producer.bhp)) throw InvalidArgument("injector BHP must exceed producer BHP");
    }
    WellConfiguration wells;
    wells.injectors = std::move(injectors);
    wells.producer = producer;
    const auto cells = rasterize_well_segment(g, producer.geometry.center, producer.geometry.azimuth_deg,
                                              producer.geometry.length);
    wells.producer_cells.reserve(cells.size());
    for (int c : cells) wells.producer_cells.push_back({c, peaceman_well_index(model, c)});
    return wells;
}

WellConfiguration with_producer_geometry(const ReservoirModel& model, const WellConfiguration& wells,
                                         const ProducerGeometry& geometry) {
    Producer p = wells.producer;
    p.geometry = geometry;
    return make_well_configuration(model, wells.injectors, p);
}

std::vector<int> corner_cells(const Grid& grid) {
    return {grid.index(0, 0), grid.index(0, grid.nx - 1), grid.index(grid.ny - 1, 0),
            grid.index(grid.ny - 1, grid.nx - 1)};
}

}  // namespace adapod
