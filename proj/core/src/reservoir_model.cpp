#include "adapod/reservoir_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace adapod {

Point Grid::center(int i) const {
    return {(col(i) + 0.5) * dx, (row(i) + 0.5) * dy};
}

bool Grid::contains(Point p) const {
    constexpr double tol = 1e-9;
    return p.x >= -tol * lx && p.x <= lx * (1 + tol) && p.y >= -tol * ly && p.y <= ly * (1 + tol);
}

int Grid::cell_at(Point p) const {
    const int c = std::clamp(static_cast<int>(std::floor(p.x / dx)), 0, nx - 1);
    const int r = std::clamp(static_cast<int>(std::floor(p.y / dy)), 0, ny - 1);
    return index(r, c);
}

Grid build_grid(int nx, int ny, double lx, double ly) {
    if (nx < 2 || ny < 2) throw InvalidArgument("grid needs at least 2 cells per direction");
    if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidArgument("grid extents must be positive");
    return Grid{nx, ny, lx, ly, lx / nx, ly / ny};
}

double ReservoirModel::total_pore_volume() const {
    double sum = 0.0;
    for (double phi : porosity) sum += phi;
    return sum * cell_volume();
}

ReservoirModel make_model(Grid grid, std::vector<double> porosity, std::vector<double> permeability,
                          FluidProperties fluid) {
    const auto n = static_cast<std::size_t>(grid.cells());
    if (porosity.size() != n || permeability.size() != n)
        throw InvalidArgument("property fields must have nx*ny entries");
    for (double phi : porosity)
        if (!(phi > 0.0 && phi <= 1.0)) throw InvalidArgument("porosity must lie in (0, 1]");
    for (double k : permeability)
        if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument("permeability must be positive");
    const double s_sum = fluid.connate_water_saturation + fluid.residual_oil_saturation;
    if (fluid.connate_water_saturation < 0.0 || fluid.residual_oil_saturation < 0.0 || s_sum >= 1.0)
        throw InvalidArgument("need 0 <= s_wc + s_or < 1");
    if (!(fluid.water_viscosity > 0.0) || !(fluid.oil_viscosity > 0.0) || !(fluid.thickness > 0.0))
        throw InvalidArgument("viscosities and thickness must be positive");
    return ReservoirModel{grid, std::move(porosity), std::move(permeability), fluid};
}

namespace {

double centerline(const Grid& grid, const ChannelParams& p, double x) {
    return p.center_y + p.amplitude * std::sin(2.0 * std::numbers::pi * p.periods * x / grid.lx + p.phase);
}

std::vector<double> smoothed_noise(const Grid& grid, int passes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<std::size_t>(grid.cells());
    std::vector<double> z(n);
    for (auto& v : z) v = normal(rng);

    std::vector<double> next(n);
    for (int pass = 0; pass < passes; ++pass) {
        for (int r = 0; r < grid.ny; ++r) {
            for (int c = 0; c < grid.nx; ++c) {
                double sum = 0.0;
                int count = 0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr < 0 || rr >= grid.ny || cc < 0 || cc >= grid.nx) continue;
                        sum += z[static_cast<std::size_t>(grid.index(rr, cc))];
                        ++count;
                    }
                }
                next[static_cast<std::size_t>(grid.index(r, c))] = sum / count;
            }
        }
        z.swap(next);
    }

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (auto& v : z) v = std::clamp(sd > 0.0 ? (v - mean) / sd : 0.0, -2.0, 2.0);
    return z;
}

}  // namespace

bool in_channel(const Grid& grid, const ChannelParams& params, int cell) {
    const Point c = grid.center(cell);
    return std::abs(c.y - centerline(grid, params, c.x)) <= 0.5 * params.width;
}

PropertyFields generate_channel_fields(const Grid& grid, const ChannelParams& params, std::uint64_t seed) {
    if (!(params.width > 0.0)) throw InvalidArgument("channel width must be positive");
    if (!(params.background_permeability > 0.0) || !(params.channel_permeability > params.background_permeability))
        throw InvalidArgument("need 0 < background permeability < channel permeability");
    if (params.noise_amplitude < 0.0 || params.smoothing_passes < 0)
        throw InvalidArgument("noise parameters must be non-negative");

    const auto n = static_cast<std::size_t>(grid.cells());
    std::vector<double> z(n, 0.0);
    if (params.noise_amplitude > 0.0) z = smoothed_noise(grid, params.smoothing_passes, seed);

    PropertyFields out;
    out.permeability.resize(n);
    out.porosity.resize(n);
    for (int i = 0; i < grid.cells(); ++i) {
        const double level = in_channel(grid, params, i) ? params.channel_permeability : params.background_permeability;
        out.permeability[static_cast<std::size_t>(i)] = level * std::exp(params.noise_amplitude * z[static_cast<std::size_t>(i)]);
    }

    const auto [kmin, kmax] = std::minmax_element(out.permeability.begin(), out.permeability.end());
    const double lo = std::log(*kmin);
    const double hi = std::log(*kmax);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = hi > lo ? (std::log(out.permeability[i]) - lo) / (hi - lo) : 0.5;
        out.porosity[i] = 0.05 + 0.30 * t;
    }
    return out;
}

void write_field(const std::filesystem::path& path, const Grid& grid, const std::vector<double>& values) {
    if (values.size() != static_cast<std::size_t>(grid.cells())) throw DimensionMismatch("field size does not match grid");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << grid.nx << ' ' << grid.ny << '\n';
    for (int r = 0; r < grid.ny; ++r) {
        for (int c = 0; c < grid.nx; ++c) {
            if (c > 0) out << ' ';
            out << format_double(values[static_cast<std::size_t>(grid.index(r, c))]);
        }
        out << '\n';
    }
}

std::vector<double> read_field(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto tokens = split_whitespace(ss.str());
    if (tokens.size() < 2) throw ParseError("field file missing header", 1, "header");
    const auto nx = parse_integer(tokens[0]);
    const auto ny = parse_integer(tokens[1]);
    if (nx != grid.nx || ny != grid.ny)
        throw DimensionMismatch("field file " + path.string() + " is " + tokens[0] + "x" + tokens[1] +
                                ", grid is " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
    const auto n = static_cast<std::size_t>(grid.cells());
    if (tokens.size() != n + 2) throw ParseError("field file has wrong number of values", 2, "values");
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = parse_double(tokens[i + 2]);
    return values;
}

}  // namespace adapod
