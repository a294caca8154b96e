#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adapod/harness.hpp"

namespace adapod {

struct Verdict {
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ExperimentOutcome {
    std::string id;
    /// File name -> CSV payload.
    std::map<std::string, std::string> files;
    std::vector<Verdict> verdicts;

    bool passed() const;
};

const std::vector<std::string>& experiment_ids();

/// Reduced-model rates, or the failure message when the basis broke down.
struct RomRun {
    RateSeries rates;
    std::optional<std::string> failure;
};

/// Shared, memoized building blocks of the experiments: reference runs,
/// trained bases and adaptation snapshots, keyed by their inputs.
class ExperimentContext {
public:
    explicit ExperimentContext(Configuration config);

    const Configuration& config() const { return config_; }
    ProducerGeometry base_geometry() const { return config_.scenario.producer; }
    ProducerGeometry target_azimuth_geometry() const;
    ProducerGeometry shifted_geometry() const;
    ProducerGeometry lengthened_geometry() const;

    /// Scenario with the given producer and the pinned evaluation seed.
    ScenarioConfig scenario_for(const ProducerGeometry& geometry) const;

    const RateSeries& reference(const ProducerGeometry& geometry);
    const PodBasis& local_basis(const ProducerGeometry& geometry, int snapshots, int r);
    /// Universal basis with the largest swept component count; truncate for smaller r.
    const PodBasis& universal_basis();
    const SnapshotMatrix& adaptation_snapshots(const ProducerGeometry& geometry, int n);
    PodBasis adaptive_basis(const PodBasis& base, const ProducerGeometry& geometry, int n, int r_res);
    RomRun rom(const PodBasis& basis, const ProducerGeometry& geometry);

private:
    Configuration config_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<RateSeries>> references_;
    std::map<std::string, std::shared_ptr<PodBasis>> bases_;
    std::map<std::string, std::shared_ptr<SnapshotMatrix>> snapshots_;
};

/// Throws InvalidArgument listing the available ids for an unknown id.
ExperimentOutcome run_experiment(const std::string& id, ExperimentContext& context);

/// Writes every payload plus verdicts.csv into `dir`.
void write_outcome(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

/// Runs one experiment (or every one for "all") into out/<id>/. A master seed,
/// when given, replaces the pinned training, evaluation and adaptation seeds.
std::vector<ExperimentOutcome> cmd_reproduce(const std::string& id, Configuration config,
                                             std::optional<std::uint64_t> seed, const std::filesystem::path& out);

}  // namespace adapod
