#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "adapod/errors.hpp"
#include "adapod/reservoir_model.hpp"
#include "adapod/units.hpp"

using namespace adapod;

TEST(Grid, ReferenceGridHas25MetreCells) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    EXPECT_DOUBLE_EQ(g.dx, 25.0);
    EXPECT_DOUBLE_EQ(g.dy, 25.0);
    EXPECT_EQ(g.cells(), 1600);
}

TEST(Grid, SmallestLegalGrid) {
    const Grid g = build_grid(2, 2, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(g.dx, 0.5);
    EXPECT_DOUBLE_EQ(g.dy, 0.5);
}

TEST(Grid, RectangularCells) {
    const Grid g = build_grid(10, 20, 100.0, 100.0);
    EXPECT_DOUBLE_EQ(g.dx, 10.0);
    EXPECT_DOUBLE_EQ(g.dy, 5.0);
}

TEST(Grid, RejectsDegenerateDimensions) {
    EXPECT_THROW(build_grid(1, 4, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(build_grid(4, 4, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(build_grid(4, 4, 1.0, -2.0), InvalidArgument);
}

TEST(Grid, FlatIndexRoundTrips) {
    const Grid g = build_grid(7, 5, 70.0, 50.0);
    for (int i = 0; i < g.cells(); ++i) {
        EXPECT_EQ(g.index(g.row(i), g.col(i)), i);
        EXPECT_EQ(g.cell_at(g.center(i)), i);
    }
}

TEST(Model, ValidatesFields) {
    const Grid g = build_grid(2, 2, 1.0, 1.0);
    const std::vector<double> phi(4, 0.2), k(4, 1e-13);
    EXPECT_NO_THROW(make_model(g, phi, k, {}));
    EXPECT_THROW(make_model(g, std::vector<double>(3, 0.2), k, {}), InvalidArgument);
    EXPECT_THROW(make_model(g, {0.2, 0.0, 0.2, 0.2}, k, {}), InvalidArgument);
    EXPECT_THROW(make_model(g, phi, {1e-13, -1.0, 1e-13, 1e-13}, {}), InvalidArgument);
    FluidProperties bad;
    bad.connate_water_saturation = 0.6;
    bad.residual_oil_saturation = 0.5;
    EXPECT_THROW(make_model(g, phi, k, bad), InvalidArgument);
}

TEST(ChannelFields, DeterministicForSeed) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const auto a = generate_channel_fields(g, {}, 42);
    const auto b = generate_channel_fields(g, {}, 42);
    EXPECT_EQ(a.permeability, b.permeability);
    EXPECT_EQ(a.porosity, b.porosity);
    const auto c = generate_channel_fields(g, {}, 43);
    EXPECT_NE(a.permeability, c.permeability);
}

TEST(ChannelFields, ZeroNoiseIsTwoValued) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    ChannelParams p;
    p.noise_amplitude = 0.0;
    const auto f = generate_channel_fields(g, p, 1);
    std::vector<double> values = f.permeability;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    ASSERT_EQ(values.size(), 2u);
    EXPECT_DOUBLE_EQ(values[0], p.background_permeability);
    EXPECT_DOUBLE_EQ(values[1], p.channel_permeability);
    for (int i = 0; i < g.cells(); ++i)
        EXPECT_EQ(f.permeability[static_cast<std::size_t>(i)] == p.channel_permeability, in_channel(g, p, i));
}

TEST(ChannelFields, DefaultContrastAndPorosityRange) {
    const Grid g = build_grid(40, 40, 1000.0, 1000.0);
    const ChannelParams p;
    const auto f = generate_channel_fields(g, p, 7);
    const auto [kmin, kmax] = std::minmax_element(f.permeability.begin(), f.permeability.end());
    EXPECT_GE(*kmax / *kmin, 10.0);
    double channel_min = 1e300, background_max = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double k = f.permeability[static_cast<std::size_t>(i)];
        if (in_channel(g, p, i)) channel_min = std::min(channel_min, k);
        else background_max = std::max(background_max, k);
    }
    EXPECT_GE(channel_min, background_max);
    for (double phi : f.porosity) {
        EXPECT_GE(phi, 0.05 - 1e-12);
        EXPECT_LE(phi, 0.35 + 1e-12);
    }
    // porosity is an increasing function of permeability
    std::vector<std::size_t> order(f.porosity.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f.permeability[a] < f.permeability[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LE(f.porosity[order[i - 1]], f.porosity[order[i]]);
}

TEST(ChannelFields, RejectsBadParameters) {
    const Grid g = build_grid(4, 4, 1.0, 1.0);
    ChannelParams p;
    p.width = 0.0;
    EXPECT_THROW(generate_channel_fields(g, p, 1), InvalidArgument);
    p = {};
    p.channel_permeability = p.background_permeability / 2.0;
    EXPECT_THROW(generate_channel_fields(g, p, 1), InvalidArgument);
}

TEST(FieldFile, RoundTripsBitExactly) {
    const Grid g = build_grid(5, 3, 50.0, 30.0);
    const auto f = generate_channel_fields(g, {}, 9);
    const auto path = std::filesystem::temp_directory_path() / "adapod_field_test.txt";
    write_field(path, g, f.permeability);
    EXPECT_EQ(read_field(path, g), f.permeability);
    EXPECT_THROW(read_field(path, build_grid(3, 5, 30.0, 50.0)), DimensionMismatch);
    std::filesystem::remove(path);
}
