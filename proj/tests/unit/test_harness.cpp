#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <gtest/gtest.h>

#include "adapod/harness.hpp"
#include "adapod/units.hpp"

using namespace adapod;
namespace fs = std::filesystem;

namespace {

Configuration tiny() {
    Configuration c = default_configuration();
    auto& s = c.scenario;
    s.nx = s.ny = 10;
    s.lx = s.ly = 250.0;
    s.channel.center_y = 125.0;
    s.channel.amplitude = 40.0;
    s.channel.width = 40.0;
    s.producer = {{137.5, 137.5}, 63.0, 50.0};
    s.total_time = units::from_days(200.0);
    s.recording_stride = 2;
    return c;
}

fs::path fresh(const char* name) {
    const auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Harness, ParallelMapKeepsInputOrder) {
    std::vector<int> items(23);
    for (int i = 0; i < 23; ++i) items[static_cast<std::size_t>(i)] = i;
    std::atomic<int> calls{0};
    const auto out = parallel_map(items, [&](int v) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::microseconds((23 - v) * 50));
        return v * v;
    }, 4);
    ASSERT_EQ(out.size(), items.size());
    for (int i = 0; i < 23; ++i) EXPECT_EQ(out[static_cast<std::size_t>(i)], i * i);
    EXPECT_EQ(calls.load(), 23);
    EXPECT_EQ(parallel_map(items, [](int v) { return v + 1; }, 1).back(), 23);
}

TEST(Harness, OutputRootFollowsTheEnvironment) {
    ::setenv(kOutputRootVariable, "/tmp/adapod-root-test", 1);
    EXPECT_EQ(default_output_root(), fs::path("/tmp/adapod-root-test"));
    ::setenv(kOutputRootVariable, "", 1);
    EXPECT_EQ(default_output_root().filename(), "adapod-out");
    ::unsetenv(kOutputRootVariable);
    EXPECT_EQ(default_output_root().filename(), "adapod-out");
}

TEST(Harness, EvaluationScheduleDependsOnSeed) {
    auto c = tiny();
    const auto a = schedule_to_text(evaluation_schedule(c.scenario));
    c.scenario.seed = 2;
    EXPECT_NE(a, schedule_to_text(evaluation_schedule(c.scenario)));
}

TEST(Harness, SimulateTrainEvaluateAdapt) {
    const auto cfg = tiny();
    const auto root = fresh("adapod_harness_test");

    const auto full = cmd_simulate(cfg, std::nullopt, root / "full", true);
    EXPECT_TRUE(fs::exists(root / "full" / "rates.csv"));
    EXPECT_TRUE(fs::exists(root / "full" / "schedule.txt"));
    EXPECT_TRUE(fs::exists(root / "full" / "snapshots.txt"));
    EXPECT_FALSE(full.rom.has_value());
    EXPECT_GT(full.run.steps, 0);

    const auto trained = cmd_train(cfg, TrainingMode::local, 60, 6, 11, root / "train");
    EXPECT_EQ(trained.basis.rank(), 6);
    EXPECT_EQ(trained.snapshots.states(), 60);
    EXPECT_TRUE(fs::exists(root / "train" / "basis.txt"));
    EXPECT_TRUE(fs::exists(root / "train" / "energy.csv"));
    const auto stored = read_basis(root / "train" / "basis.txt");
    EXPECT_EQ(stored.U, trained.basis.U);

    const auto rom = cmd_simulate(cfg, root / "train" / "basis.txt", root / "rom", false);
    ASSERT_TRUE(rom.rom.has_value());
    EXPECT_EQ(rom.rom->rank, 6);

    const auto cmp = cmd_evaluate(root / "full" / "rates.csv", rom.rates_path, root / "eval", 100);
    EXPECT_TRUE(fs::exists(root / "eval" / "rrse.csv"));
    EXPECT_GE(cmp.rrse_oil, 0.0);
    EXPECT_LT(cmp.rrse_oil, 0.5);
    const auto self = cmd_evaluate(root / "full" / "rates.csv", root / "full" / "rates.csv", root / "self", 100);
    EXPECT_DOUBLE_EQ(self.rrse_oil, 0.0);
    EXPECT_DOUBLE_EQ(self.rrse_water, 0.0);

    auto moved = cfg;
    moved.scenario.producer.azimuth_deg = 150.0;
    const auto adapted = cmd_adapt(moved, root / "train" / "basis.txt", 8, 2, 23, root / "adapt");
    EXPECT_EQ(adapted.basis.rank(), 8);
    EXPECT_EQ(adapted.basis.lineage.base_hash, stored.hash());
    EXPECT_TRUE(fs::exists(root / "adapt" / "basis.txt"));
    fs::remove_all(root);
}

TEST(Harness, TrainingIsDeterministic) {
    const auto cfg = tiny();
    const auto a = train_basis(cfg.scenario, TrainingMode::universal, 30, 4, 5);
    const auto b = train_basis(cfg.scenario, TrainingMode::universal, 30, 4, 5);
    EXPECT_EQ(a.basis.U, b.basis.U);
    EXPECT_EQ(a.basis.hash(), b.basis.hash());
    ASSERT_FALSE(a.energy.empty());
    EXPECT_LE(a.energy.back(), 1.0);
}
