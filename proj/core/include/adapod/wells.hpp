#pragma once

#include <vector>

#include "adapod/reservoir_model.hpp"

namespace adapod {

struct Injector {
    int cell = 0;
    double bhp = 0.0;  // Pa
};

/// Horizontal producer section. Azimuth is measured in degrees clockwise from
/// the +x axis, i.e. the direction vector is (cos a, -sin a) with y pointing up.
struct ProducerGeometry {
    Point center;
    double azimuth_deg = 0.0;
    double length = 0.0;  // m
};

struct Producer {
    ProducerGeometry geometry;
    double bhp = 0.0;  // Pa
};

struct Perforation {
    int cell = 0;
    double well_index = 0.0;  // m^3 (geometric, mobility excluded)
};

struct WellConfiguration {
    std::vector<Injector> injectors;
    Producer producer;
    std::vector<Perforation> producer_cells;
};

/// Supercover rasterization of a line segment: every cell whose half-open box
/// the segment touches, ordered from the first endpoint to the second, without
/// duplicates. When the segment passes exactly through a grid corner both side
/// cells are included. Throws OutOfDomain if an endpoint is outside the grid.
std::vector<int> rasterize_well_segment(const Grid& grid, Point center, double azimuth_deg, double length);

/// Endpoints of the producer segment, first one at center - length/2 * direction.
std::pair<Point, Point> segment_endpoints(Point center, double azimuth_deg, double length);

/// Peaceman index 2*pi*k*h / ln(r_e / r_w), r_e = 0.2 * dx, r_w = 0.1 m.
double peaceman_well_index(const ReservoirModel& model, int cell);

inline constexpr double kWellboreRadius = 0.1;

/// Rasterizes the producer, attaches well indices and checks that every
/// injector BHP exceeds the producer BHP.
WellConfiguration make_well_configuration(const ReservoirModel& model, std::vector<Injector> injectors,
                                          Producer producer);

/// Same layout with a new producer geometry (injector cells and BHPs kept).
WellConfiguration with_producer_geometry(const ReservoirModel& model, const WellConfiguration& wells,
                                         const ProducerGeometry& geometry);

/// Cell indices of the four grid corners, the default injector layout.
std::vector<int> corner_cells(const Grid& grid);

}  // namespace adapod
