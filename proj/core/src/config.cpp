#include "adapod/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"
#include "adapod/units.hpp"

namespace adapod {

KeyValueFile KeyValueFile::parse(std::string_view text) {
    KeyValueFile out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no, std::string(line));
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": missing key", line_no, "");
        if (out.entries.count(key))
            throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", line_no, key);
        out.entries[key] = {value, line_no};
    }
    return out;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void KeyValueFile::merge(const KeyValueFile& other) {
    for (const auto& [k, v] : other.entries) entries[k] = v;
}

namespace {

struct Field {
    const char* key;
    std::function<void(Configuration&, const std::string&)> set;
    std::function<std::string(const Configuration&)> get;
    bool scenario;
};

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    for (const auto& t : split(v, ',')) out.push_back(static_cast<int>(parse_integer(trim(t))));
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

std::string int_list(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::uint64_t parse_u64(const std::string& v) {
    const long long x = parse_integer(v);
    if (x < 0) throw InvalidArgument("expected a non-negative integer");
    return static_cast<std::uint64_t>(x);
}

#define ADAPOD_REAL(KEY, EXPR, TO, FROM, SCEN)                                                     \
    Field {                                                                                        \
        KEY, [](Configuration& c, const std::string& v) { c.EXPR = FROM(parse_double(v)); },     \
            [](const Configuration& c) { return format_double(TO(c.EXPR)); }, SCEN                 \
    }
#define ADAPOD_INT(KEY, EXPR, SCEN)                                                                        \
    Field {                                                                                                \
        KEY, [](Configuration& c, const std::string& v) { c.EXPR = static_cast<int>(parse_integer(v)); }, \
            [](const Configuration& c) { return std::to_string(c.EXPR); }, SCEN                            \
    }
#define ADAPOD_U64(KEY, EXPR, SCEN)                                                          \
    Field {                                                                                  \
        KEY, [](Configuration& c, const std::string& v) { c.EXPR = parse_u64(v); },         \
            [](const Configuration& c) { return std::to_string(c.EXPR); }, SCEN              \
    }
#define ADAPOD_LIST(KEY, EXPR)                                                                \
    Field {                                                                                   \
        KEY, [](Configuration& c, const std::string& v) { c.EXPR = parse_int_list(v); },     \
            [](const Configuration& c) { return int_list(c.EXPR); }, false                    \
    }
#define ADAPOD_TEXT(KEY, EXPR)                                                      \
    Field {                                                                         \
        KEY, [](Configuration& c, const std::string& v) { c.EXPR = v; },           \
            [](const Configuration& c) { return c.EXPR; }, true                     \
    }

double same(double x) { return x; }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        ADAPOD_INT("grid.nx", scenario.nx, true),
        ADAPOD_INT("grid.ny", scenario.ny, true),
        ADAPOD_REAL("grid.lx_m", scenario.lx, same, same, true),
        ADAPOD_REAL("grid.ly_m", scenario.ly, same, same, true),
        ADAPOD_REAL("field.background_md", scenario.channel.background_permeability, units::to_md, units::from_md, true),
        ADAPOD_REAL("field.channel_md", scenario.channel.channel_permeability, units::to_md, units::from_md, true),
        ADAPOD_REAL("field.center_y_m", scenario.channel.center_y, same, same, true),
        ADAPOD_REAL("field.amplitude_m", scenario.channel.amplitude, same, same, true),
        ADAPOD_REAL("field.periods", scenario.channel.periods, same, same, true),
        ADAPOD_REAL("field.phase_rad", scenario.channel.phase, same, same, true),
        ADAPOD_REAL("field.width_m", scenario.channel.width, same, same, true),
        ADAPOD_REAL("field.noise", scenario.channel.noise_amplitude, same, same, true),
        ADAPOD_INT("field.smoothing_passes", scenario.channel.smoothing_passes, true),
        ADAPOD_U64("field.seed", scenario.field_seed, true),
        ADAPOD_TEXT("field.permeability_file", scenario.permeability_file),
        ADAPOD_TEXT("field.porosity_file", scenario.porosity_file),
        ADAPOD_REAL("fluid.water_viscosity_cp", scenario.fluid.water_viscosity, units::to_cp, units::from_cp, true),
        ADAPOD_REAL("fluid.oil_viscosity_cp", scenario.fluid.oil_viscosity, units::to_cp, units::from_cp, true),
        ADAPOD_REAL("fluid.connate_water", scenario.fluid.connate_water_saturation, same, same, true),
        ADAPOD_REAL("fluid.residual_oil", scenario.fluid.residual_oil_saturation, same, same, true),
        ADAPOD_REAL("fluid.thickness_m", scenario.fluid.thickness, same, same, true),
        ADAPOD_REAL("wells.injector_bhp_min_bar", scenario.injector_bhp_min, units::to_bar, units::from_bar, true),
        ADAPOD_REAL("wells.injector_bhp_max_bar", scenario.injector_bhp_max, units::to_bar, units::from_bar, true),
        ADAPOD_REAL("wells.producer_x_m", scenario.producer.center.x, same, same, true),
        ADAPOD_REAL("wells.producer_y_m", scenario.producer.center.y, same, same, true),
        ADAPOD_REAL("wells.producer_azimuth_deg", scenario.producer.azimuth_deg, same, same, true),
        ADAPOD_REAL("wells.producer_length_m", scenario.producer.length, same, same, true),
        ADAPOD_REAL("wells.producer_bhp_bar", scenario.producer_bhp, units::to_bar, units::from_bar, true),
        ADAPOD_REAL("schedule.total_days", scenario.total_time, units::to_days, units::from_days, true),
        ADAPOD_REAL("schedule.interval_days", scenario.interval_length, units::to_days, units::from_days, true),
        ADAPOD_INT("schedule.recording_stride", scenario.recording_stride, true),
        ADAPOD_REAL("schedule.cfl_factor", scenario.time_step.cfl_factor, same, same, true),
        ADAPOD_REAL("schedule.dt_max_days", scenario.time_step.dt_max, units::to_days, units::from_days, true),
        ADAPOD_U64("run.seed", scenario.seed, false),
        ADAPOD_U64("experiments.training_seed", experiments.training_seed, false),
        ADAPOD_U64("experiments.evaluation_seed", experiments.evaluation_seed, false),
        ADAPOD_U64("experiments.adaptation_seed", experiments.adaptation_seed, false),
        ADAPOD_INT("experiments.alignment_points", experiments.alignment_points, false),
        ADAPOD_INT("experiments.universal_snapshots", experiments.universal_snapshots, false),
        ADAPOD_LIST("experiments.universal_components", experiments.universal_components),
        ADAPOD_INT("experiments.local_snapshots", experiments.local_snapshots, false),
        ADAPOD_INT("experiments.local_components", experiments.local_components, false),
        ADAPOD_REAL("experiments.target_azimuth_deg", experiments.target_azimuth, same, same, false),
        ADAPOD_INT("experiments.adapt_snapshots", experiments.adapt_snapshots, false),
        ADAPOD_INT("experiments.adapt_components", experiments.adapt_components, false),
        ADAPOD_REAL("experiments.position_shift_x_m", experiments.position_shift_x, same, same, false),
        ADAPOD_REAL("experiments.position_shift_y_m", experiments.position_shift_y, same, same, false),
        ADAPOD_INT("experiments.position_snapshots", experiments.position_snapshots, false),
        ADAPOD_INT("experiments.position_components", experiments.position_components, false),
        ADAPOD_REAL("experiments.target_length_m", experiments.target_length, same, same, false),
        ADAPOD_INT("experiments.length_snapshots", experiments.length_snapshots, false),
        ADAPOD_INT("experiments.length_components", experiments.length_components, false),
        ADAPOD_LIST("experiments.sensitivity_snapshots", experiments.sensitivity_snapshots),
        ADAPOD_LIST("experiments.sensitivity_components", experiments.sensitivity_components),
        ADAPOD_INT("experiments.sensitivity_components_snapshots", experiments.sensitivity_components_snapshots, false),
        ADAPOD_REAL("thresholds.universal_ratio", experiments.universal_ratio, same, same, false),
        ADAPOD_REAL("thresholds.mismatch_factor", experiments.mismatch_factor, same, same, false),
        ADAPOD_REAL("thresholds.adaptive_max_rrse", experiments.adaptive_max_rrse, same, same, false),
        ADAPOD_REAL("thresholds.local_max_rrse", experiments.local_max_rrse, same, same, false),
        ADAPOD_REAL("thresholds.scratch_factor", experiments.scratch_factor, same, same, false),
        ADAPOD_REAL("thresholds.components_band", experiments.components_band, same, same, false),
    };
    return table;
}

#undef ADAPOD_REAL
#undef ADAPOD_INT
#undef ADAPOD_U64
#undef ADAPOD_LIST
#undef ADAPOD_TEXT

void apply(Configuration& c, const KeyValueFile& file) {
    const auto& table = fields();
    for (const auto& [key, entry] : file.entries) {
        const Field* f = nullptr;
        for (const auto& candidate : table)
            if (key == candidate.key) f = &candidate;
        if (!f) throw ParseError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'", entry.line, key);
        try {
            f->set(c, entry.value);
        } catch (const InvalidArgument& e) {
            throw ParseError("line " + std::to_string(entry.line) + ": bad value for '" + key + "': " + e.what(),
                             entry.line, key);
        }
    }
}

void validate(const Configuration& c, const KeyValueFile& overrides) {
    const auto& s = c.scenario;
    auto fail = [&](const std::string& key, const std::string& why) {
        const auto it = overrides.entries.find(key);
        const int line = it == overrides.entries.end() ? 0 : it->second.line;
        throw ParseError(key + ": " + why, line, key);
    };
    if (s.nx < 2) fail("grid.nx", "grid needs at least two cells per direction");
    if (s.ny < 2) fail("grid.ny", "grid needs at least two cells per direction");
    if (!(s.lx > 0.0) || !(s.ly > 0.0)) fail("grid.lx_m", "domain extent must be positive");
    if (!(s.injector_bhp_max >= s.injector_bhp_min)) fail("wells.injector_bhp_max_bar", "BHP range is inverted");
    if (!(s.injector_bhp_min > s.producer_bhp)) fail("wells.producer_bhp_bar", "producer BHP must be below injector BHPs");
    if (!(s.total_time >= 0.0)) fail("schedule.total_days", "must be non-negative");
    if (!(s.interval_length > 0.0)) fail("schedule.interval_days", "must be positive");
    if (s.recording_stride < 1) fail("schedule.recording_stride", "must be >= 1");
    if (!(s.time_step.cfl_factor > 0.0 && s.time_step.cfl_factor <= 1.0)) fail("schedule.cfl_factor", "must lie in (0, 1]");
    if (!(s.time_step.dt_max > 0.0)) fail("schedule.dt_max_days", "must be positive");
    if (c.experiments.alignment_points < 2) fail("experiments.alignment_points", "must be >= 2");
}

}  // namespace

std::string scenario_to_text(const ScenarioConfig& scenario) {
    Configuration c;
    c.scenario = scenario;
    std::string out;
    for (const auto& f : fields())
        if (f.scenario) out += std::string(f.key) + " = " + f.get(c) + "\n";
    return out;
}

std::uint64_t ScenarioConfig::hash() const {
    const std::string text = scenario_to_text(*this);
    return fnv1a(text.data(), text.size());
}

Configuration configuration_from(const KeyValueFile& overrides) {
    Configuration c;
    KeyValueFile merged = KeyValueFile::parse(embedded_defaults());
    apply(c, merged);
    apply(c, overrides);
    validate(c, overrides);
    return c;
}

Configuration default_configuration() { return configuration_from(KeyValueFile{}); }

Configuration load_configuration(const std::filesystem::path& path) {
    return configuration_from(KeyValueFile::load(path));
}

ReservoirModel build_model(const ScenarioConfig& s) {
    Grid grid = build_grid(s.nx, s.ny, s.lx, s.ly);
    PropertyFields fields = generate_channel_fields(grid, s.channel, s.field_seed);
    if (!s.permeability_file.empty()) {
        fields.permeability = read_field(s.permeability_file, grid);
        for (auto& k : fields.permeability) k = units::from_md(k);
    }
    if (!s.porosity_file.empty()) fields.porosity = read_field(s.porosity_file, grid);
    return make_model(grid, std::move(fields.porosity), std::move(fields.permeability), s.fluid);
}

WellConfiguration build_wells(const ReservoirModel& model, const ScenarioConfig& s) {
    std::vector<Injector> injectors;
    const double bhp = 0.5 * (s.injector_bhp_min + s.injector_bhp_max);
    for (int cell : corner_cells(model.grid)) injectors.push_back({cell, bhp});
    return make_well_configuration(model, std::move(injectors), Producer{s.producer, s.producer_bhp});
}

ControlPlan control_plan(const ScenarioConfig& s, bool randomize_azimuth) {
    ControlPlan plan;
    plan.total_time = s.total_time;
    plan.interval_length = s.interval_length;
    plan.injector_count = 4;
    plan.bhp_min = s.injector_bhp_min;
    plan.bhp_max = s.injector_bhp_max;
    plan.randomize_azimuth = randomize_azimuth;
    plan.base_geometry = s.producer;
    plan.recording_stride = s.recording_stride;
    return plan;
}

SimulationOptions simulation_options(const ScenarioConfig& s) {
    SimulationOptions o;
    o.time_step = s.time_step;
    return o;
}

}  // namespace adapod
