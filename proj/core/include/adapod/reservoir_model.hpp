#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace adapod {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform Cartesian grid. Cells are flattened row-major: i = row * nx + col,
/// with row 0 at y = 0 and col 0 at x = 0.
struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    int cells() const { return nx * ny; }
    int index(int row, int col) const { return row * nx + col; }
    int row(int i) const { return i / nx; }
    int col(int i) const { return i % nx; }
    Point center(int i) const;
    bool contains(Point p) const;
    /// Cell owning p under half-open [x0, x1) x [y0, y1) ownership; points on
    /// the far domain edges belong to the last row/column.
    int cell_at(Point p) const;
    double cell_area() const { return dx * dy; }
};

/// Throws InvalidArgument unless nx, ny >= 2 and lx, ly > 0.
Grid build_grid(int nx, int ny, double lx, double ly);

struct FluidProperties {
    double water_viscosity = 1.0e-3;  // Pa*s
    double oil_viscosity = 5.0e-3;    // Pa*s
    double connate_water_saturation = 0.1;
    double residual_oil_saturation = 0.1;
    double thickness = 1.0;  // m, 2D slab thickness

    double min_saturation() const { return connate_water_saturation; }
    double max_saturation() const { return 1.0 - residual_oil_saturation; }
};

struct ReservoirModel {
    Grid grid;
    std::vector<double> porosity;
    std::vector<double> permeability;  // m^2, isotropic
    FluidProperties fluid;

    double cell_volume() const { return grid.cell_area() * fluid.thickness; }
    double pore_volume(int i) const { return porosity[static_cast<std::size_t>(i)] * cell_volume(); }
    double total_pore_volume() const;
};

/// Validates field lengths, positivity and saturation endpoints.
ReservoirModel make_model(Grid grid, std::vector<double> porosity, std::vector<double> permeability,
                          FluidProperties fluid);

/// Parameters of the synthetic fluvial-channel field generator.
///
/// The channel centerline is y(x) = center_y + amplitude * sin(2*pi*periods*x/lx + phase).
/// Cells whose center lies within width/2 of the centerline get channel_permeability,
/// all others background_permeability. A smoothed, seeded Gaussian field z (unit
/// variance, clipped to [-2, 2]) multiplies both levels by exp(noise_amplitude * z).
/// Porosity is an affine map of log-permeability onto [0.05, 0.35].
struct ChannelParams {
    double background_permeability = 50.0 * 9.869233e-16;
    double channel_permeability = 1000.0 * 9.869233e-16;
    double center_y = 500.0;
    double amplitude = 150.0;
    double periods = 1.0;
    double phase = 0.0;
    double width = 150.0;
    double noise_amplitude = 0.3;
    int smoothing_passes = 3;
};

struct PropertyFields {
    std::vector<double> porosity;
    std::vector<double> permeability;
};

PropertyFields generate_channel_fields(const Grid& grid, const ChannelParams& params, std::uint64_t seed);

/// True when the cell center lies inside the channel band.
bool in_channel(const Grid& grid, const ChannelParams& params, int cell);

// Field files: header "nx ny" then nx*ny values in row-major order.
void write_field(const std::filesystem::path& path, const Grid& grid, const std::vector<double>& values);
std::vector<double> read_field(const std::filesystem::path& path, const Grid& grid);

}  // namespace adapod
