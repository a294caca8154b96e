#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adapod/fullsim.hpp"
#include "adapod/reservoir_model.hpp"
#include "adapod/schedule.hpp"
#include "adapod/wells.hpp"

namespace adapod {

/// Contents of the versioned experiment defaults file compiled into the library.
std::string_view embedded_defaults();

/// Flat "section.key = value" file. '#' starts a comment.
struct KeyValueFile {
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries;

    static KeyValueFile parse(std::string_view text);
    static KeyValueFile load(const std::filesystem::path& path);
    /// Entries of `other` replace entries with the same key.
    void merge(const KeyValueFile& other);
    bool has(const std::string& key) const { return entries.count(key) != 0; }
};

/// Physical scenario: everything needed to build the model, wells and controls.
/// Pressures in Pa, times in s, lengths in m.
struct ScenarioConfig {
    int nx = 40;
    int ny = 40;
    double lx = 1000.0;
    double ly = 1000.0;
    ChannelParams channel;
    std::uint64_t field_seed = 7;
    std::string permeability_file;  // optional, mD
    std::string porosity_file;      // optional

    FluidProperties fluid;

    double injector_bhp_min = 250e5;
    double injector_bhp_max = 350e5;
    ProducerGeometry producer{{512.5, 512.5}, 63.0, 150.0};
    double producer_bhp = 100e5;

    double total_time = 1500.0 * 86400.0;
    double interval_length = 50.0 * 86400.0;
    int recording_stride = 10;
    TimeStepOptions time_step;

    std::uint64_t seed = 1;

    /// Fingerprint of every field except the seed.
    std::uint64_t hash() const;
};

/// Experiment sizes, pinned seeds and acceptance thresholds.
struct ExperimentSettings {
    std::uint64_t training_seed = 11;
    std::uint64_t evaluation_seed = 1;
    std::uint64_t adaptation_seed = 23;
    int alignment_points = 200;

    int universal_snapshots = 2000;
    std::vector<int> universal_components{20, 40, 60, 80, 100, 120};
    int local_snapshots = 1000;
    int local_components = 20;
    double target_azimuth = 175.0;
    int adapt_snapshots = 10;
    int adapt_components = 3;
    double position_shift_x = 50.0;
    double position_shift_y = 50.0;
    int position_snapshots = 50;
    int position_components = 1;
    double target_length = 250.0;
    int length_snapshots = 50;
    int length_components = 1;
    std::vector<int> sensitivity_snapshots{10, 30, 50, 100};
    std::vector<int> sensitivity_components{1, 3, 5, 10};
    int sensitivity_components_snapshots = 50;

    double universal_ratio = 0.5;
    double mismatch_factor = 2.0;
    double adaptive_max_rrse = 0.35;
    double local_max_rrse = 0.2;
    double scratch_factor = 1.5;
    double components_band = 0.25;
};

struct Configuration {
    ScenarioConfig scenario;
    ExperimentSettings experiments;
};

/// Builds a configuration from the embedded defaults overlaid with `overrides`.
/// Unknown keys and malformed values raise ParseError with line and key.
Configuration configuration_from(const KeyValueFile& overrides);
Configuration default_configuration();
Configuration load_configuration(const std::filesystem::path& path);

/// Canonical "key = value" listing of every scenario field.
std::string scenario_to_text(const ScenarioConfig& scenario);

ReservoirModel build_model(const ScenarioConfig& scenario);
/// Corner injectors at the midpoint of the BHP range plus the configured producer.
WellConfiguration build_wells(const ReservoirModel& model, const ScenarioConfig& scenario);
ControlPlan control_plan(const ScenarioConfig& scenario, bool randomize_azimuth);
SimulationOptions simulation_options(const ScenarioConfig& scenario);

}  // namespace adapod
