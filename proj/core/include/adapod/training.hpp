#pragma once

#include <cstdint>
#include <string>

#include "adapod/fullsim.hpp"
#include "adapod/pod.hpp"
#include "adapod/schedule.hpp"

namespace adapod {

enum class TrainingMode { universal, local };

/// Universal training varies the producer azimuth per control interval,
/// local training keeps the well geometry fixed.
struct TrainingPlan {
    TrainingMode mode = TrainingMode::local;
    ControlPlan controls;
    int snapshot_target = 1000;
};

/// Throws InvalidArgument when the mode and azimuth randomization disagree.
void validate_training_plan(const TrainingPlan& plan);

TrainingPlan make_training_plan(TrainingMode mode, ControlPlan controls, int snapshot_target);

/// Deterministic per-episode seed stream (splitmix64).
std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t episode);

struct CampaignResult {
    SnapshotMatrix snapshots;
    int episodes = 0;
    long steps = 0;
};

/// Runs episodes from the initial state, each under a fresh random schedule,
/// until `plan.snapshot_target` pressure snapshots are recorded.
CampaignResult collect_snapshots(const ReservoirModel& model, const WellConfiguration& wells, const TrainingPlan& plan,
                                 std::uint64_t seed, std::string scenario = "training",
                                 const SimulationOptions& options = {});

}  // namespace adapod
