#include "adapod/harness.hpp"

#include <cstdlib>
#include <fstream>

#include <spdlog/spdlog.h>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace fs = std::filesystem;

namespace adapod {

fs::path default_output_root() {
    const char* env = std::getenv(kOutputRootVariable);
    if (env && *env) return fs::path(env);
    return fs::path("adapod-out");
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

Schedule evaluation_schedule(const ScenarioConfig& scenario) {
    return random_schedule(control_plan(scenario, false), scenario.seed);
}

TrainOutcome train_basis(const ScenarioConfig& scenario, TrainingMode mode, int snapshots, int r, std::uint64_t seed) {
    if (snapshots < r)
        throw RankDeficiency("snapshot target " + std::to_string(snapshots) + " is below the requested rank " +
                                 std::to_string(r),
                             snapshots);
    const ReservoirModel model = build_model(scenario);
    const WellConfiguration wells = build_wells(model, scenario);
    const TrainingPlan plan = make_training_plan(mode, control_plan(scenario, mode == TrainingMode::universal), snapshots);
    const std::uint64_t config_hash = scenario.hash();
    CampaignResult campaign = collect_snapshots(model, wells, plan, seed,
                                                mode == TrainingMode::universal ? "universal" : "local",
                                                simulation_options(scenario));
    campaign.snapshots.provenance.config_hash = config_hash;

    Lineage lineage;
    lineage.kind = mode == TrainingMode::universal ? LineageKind::universal : LineageKind::local;
    lineage.config = hex64(config_hash);
    TrainOutcome out;
    out.basis = compute_pod_basis(campaign.snapshots.data, r, lineage);
    out.basis.seed = seed;
    out.basis.config_hash = config_hash;
    out.energy = energy_spectrum(out.basis);
    out.episodes = campaign.episodes;
    out.snapshots = std::move(campaign.snapshots);
    spdlog::info("trained {} basis: {} snapshots from {} episodes, r = {}, energy captured {:.10f}",
                 lineage.kind == LineageKind::universal ? "universal" : "local", out.snapshots.states(),
                 out.episodes, r, out.energy[static_cast<std::size_t>(r - 1)]);
    return out;
}

namespace {

std::string run_metadata(const Configuration& config, const SimulationResult& run, const std::string& model_kind) {
    std::string s;
    s += "model = " + model_kind + "\n";
    s += "config_hash = " + hex64(config.scenario.hash()) + "\n";
    s += "seed = " + std::to_string(config.scenario.seed) + "\n";
    s += "steps = " + std::to_string(run.steps) + "\n";
    s += "mass_balance_error = " + format_double(run.balance.relative_error()) + "\n";
    s += "clamped_volume_m3 = " + format_double(run.balance.clamped_volume) + "\n";
    s += "pressure_solve_s = " + format_double(run.timers.pressure_solve_s) + "\n";
    s += "total_s = " + format_double(run.timers.total_s) + "\n";
    return s;
}

}  // namespace

SimulateOutcome cmd_simulate(const Configuration& config, const std::optional<fs::path>& basis_path, const fs::path& out,
                             bool write_snapshots) {
    const auto& sc = config.scenario;
    const ReservoirModel model = build_model(sc);
    const WellConfiguration wells = build_wells(model, sc);
    const Schedule schedule = evaluation_schedule(sc);
    fs::create_directories(out);
    write_schedule(out / "schedule.txt", schedule);

    SimulateOutcome result;
    if (basis_path) {
        const PodBasis basis = read_basis(*basis_path);
        if (basis.cells() != model.grid.cells())
            throw BasisInadequate("basis " + basis_path->string() + " has " + std::to_string(basis.cells()) +
                                  " rows but the grid has " + std::to_string(model.grid.cells()) + " cells");
        result.rom = run_rom_simulation(model, wells, basis, schedule, simulation_options(sc));
        result.run = result.rom->run;
        write_rom_metadata(out / "run.meta", basis, *result.rom);
    } else {
        SnapshotRecorder recorder(sc.recording_stride);
        result.run = run_simulation(model, wells, schedule, write_snapshots ? &recorder : nullptr, simulation_options(sc));
        write_text(out / "run.meta", run_metadata(config, result.run, "full"));
        if (write_snapshots) {
            SnapshotProvenance prov{"simulate", sc.hash(), sc.recording_stride, sc.seed};
            const auto states = recorder.take();
            if (!states.empty()) adapod::write_snapshots(out / "snapshots.txt", build_snapshot_matrix(states, prov));
        }
    }
    result.rates_path = out / "rates.csv";
    write_rates(result.rates_path, result.run.rates);
    spdlog::info("simulated {} steps in {:.3f} s, rates written to {}", result.run.steps, result.run.timers.total_s,
                 result.rates_path.string());
    return result;
}

TrainOutcome cmd_train(const Configuration& config, TrainingMode mode, int snapshots, int r, std::uint64_t seed,
                       const fs::path& out) {
    TrainOutcome t = train_basis(config.scenario, mode, snapshots, r, seed);
    fs::create_directories(out);
    write_basis(out / "basis.txt", t.basis);
    std::string energy = "components,energy\n";
    for (std::size_t k = 0; k < t.energy.size(); ++k)
        energy += std::to_string(k + 1) + "," + format_double(t.energy[k]) + "\n";
    write_text(out / "energy.csv", energy);
    return t;
}

AdaptationReport cmd_adapt(const Configuration& config, const fs::path& base_path, int snapshots, int r_res,
                           std::uint64_t seed, const fs::path& out) {
    const auto& sc = config.scenario;
    const PodBasis base = read_basis(base_path);
    const ReservoirModel model = build_model(sc);
    if (base.cells() != model.grid.cells())
        throw DimensionMismatch("base basis has " + std::to_string(base.cells()) + " rows but the grid has " +
                                std::to_string(model.grid.cells()) + " cells");
    const WellConfiguration wells = build_wells(model, sc);
    AdaptationReport report =
        adapt_workflow(base, model, wells, control_plan(sc, false), snapshots, r_res, seed, simulation_options(sc));
    fs::create_directories(out);
    write_basis(out / "basis.txt", report.basis);
    std::string summary;
    summary += "base_hash = " + base.hash() + "\n";
    summary += "rank = " + std::to_string(report.basis.rank()) + "\n";
    summary += "new_snapshots = " + std::to_string(snapshots) + "\n";
    summary += "residual_components = " + std::to_string(r_res) + "\n";
    summary += "residual_energy_fraction = " + format_double(report.residual_energy_fraction) + "\n";
    write_text(out / "adapt.meta", summary);
    spdlog::info("adaptive basis with {} components written to {}", report.basis.rank(), (out / "basis.txt").string());
    return report;
}

RateComparison cmd_evaluate(const fs::path& reference, const fs::path& prediction, const fs::path& out, int points) {
    const RateSeries ref = read_rates(reference);
    const RateSeries pred = read_rates(prediction);
    RateComparison cmp = compare_rates(pred, ref, points, prediction.string(), reference.string());
    fs::create_directories(out);
    write_text(out / "rrse.csv", "rrse_oil,rrse_water\n" + format_double(cmp.rrse_oil) + "," +
                                     format_double(cmp.rrse_water) + "\n");
    return cmp;
}

}  // namespace adapod
