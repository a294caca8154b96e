#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "adapod/adaptive.hpp"
#include "adapod/config.hpp"
#include "adapod/evaluation.hpp"
#include "adapod/pod.hpp"
#include "adapod/rom.hpp"
#include "adapod/training.hpp"

namespace adapod {

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootVariable = "ADAPOD_OUTPUT_ROOT";

/// $ADAPOD_OUTPUT_ROOT if set and non-empty, otherwise ./adapod-out.
std::filesystem::path default_output_root();

/// Applies fn to every item, running up to `workers` calls at once (default:
/// hardware concurrency). Results keep the input order.
template <class T, class Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, unsigned workers = 0)
    -> std::vector<decltype(fn(items.front()))> {
    using R = decltype(fn(items.front()));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<R> out;
    out.reserve(items.size());
    if (workers == 1) {
        for (const auto& item : items) out.push_back(fn(item));
        return out;
    }
    for (std::size_t start = 0; start < items.size(); start += workers) {
        const std::size_t stop = std::min(items.size(), start + workers);
        std::vector<std::future<R>> batch;
        for (std::size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, [&fn, &items, i] { return fn(items[i]); }));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

/// Pressure snapshots and energy of a training run.
struct TrainOutcome {
    PodBasis basis;
    SnapshotMatrix snapshots;
    std::vector<double> energy;
    int episodes = 0;
};

/// Runs the full model on the scenario's training plan and computes an
/// r-component POD basis.
TrainOutcome train_basis(const ScenarioConfig& scenario, TrainingMode mode, int snapshots, int r, std::uint64_t seed);

/// Random-control scenario run used for evaluation (seeded by scenario.seed).
Schedule evaluation_schedule(const ScenarioConfig& scenario);

struct SimulateOutcome {
    SimulationResult run;
    std::optional<RomSimulationResult> rom;
    std::filesystem::path rates_path;
};

/// CLI entry points. Each writes its artifacts below `out`.
SimulateOutcome cmd_simulate(const Configuration& config, const std::optional<std::filesystem::path>& basis_path,
                             const std::filesystem::path& out, bool write_snapshots);
TrainOutcome cmd_train(const Configuration& config, TrainingMode mode, int snapshots, int r, std::uint64_t seed,
                       const std::filesystem::path& out);
AdaptationReport cmd_adapt(const Configuration& config, const std::filesystem::path& base_path, int snapshots,
                           int r_res, std::uint64_t seed, const std::filesystem::path& out);
RateComparison cmd_evaluate(const std::filesystem::path& reference, const std::filesystem::path& prediction,
                            const std::filesystem::path& out, int points = 200);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace adapod
