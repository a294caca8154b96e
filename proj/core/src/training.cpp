#include "adapod/training.hpp"

#include "adapod/errors.hpp"

namespace adapod {

void validate_training_plan(const TrainingPlan& plan) {
    if (plan.mode == TrainingMode::universal && !plan.controls.randomize_azimuth)
        throw InvalidArgument("universal training requires azimuth randomization");
    if (plan.mode == TrainingMode::local && plan.controls.randomize_azimuth)
        throw InvalidArgument("local training keeps the producer geometry fixed");
    if (plan.snapshot_target < 1) throw InvalidArgument("snapshot target must be >= 1");
    if (!(plan.controls.total_time > 0.0)) throw InvalidArgument("training episodes need a positive duration");
}

TrainingPlan make_training_plan(TrainingMode mode, ControlPlan controls, int snapshot_target) {
    controls.randomize_azimuth = mode == TrainingMode::universal;
    TrainingPlan plan{mode, std::move(controls), snapshot_target};
    validate_training_plan(plan);
    return plan;
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t episode) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (episode + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

CampaignResult collect_snapshots(const ReservoirModel& model, const WellConfiguration& wells, const TrainingPlan& plan,
                                 std::uint64_t seed, std::string scenario, const SimulationOptions& options) {
    validate_training_plan(plan);
    SimulationOptions sim = options;
    sim.keep_trajectory = false;

    CampaignResult out;
    std::vector<Eigen::VectorXd> collected;
    constexpr int kMaxEpisodes = 1000;
    while (static_cast<int>(collected.size()) < plan.snapshot_target) {
        if (out.episodes == kMaxEpisodes) throw Error("training episodes record no snapshots");
        const Schedule schedule = random_schedule(plan.controls, episode_seed(seed, static_cast<std::uint64_t>(out.episodes)));
        SnapshotRecorder episode(plan.controls.recording_stride,
                                 plan.snapshot_target - static_cast<int>(collected.size()));
        const auto run = run_simulation(model, wells, schedule, &episode, sim);
        out.steps += run.steps;
        ++out.episodes;
        for (auto& s : episode.take()) collected.push_back(std::move(s));
    }
    SnapshotProvenance prov{std::move(scenario), 0, plan.controls.recording_stride, seed};
    out.snapshots = build_snapshot_matrix(collected, std::move(prov));
    return out;
}

}  // namespace adapod
