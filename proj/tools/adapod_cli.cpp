#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "adapod/errors.hpp"
#include "adapod/experiments.hpp"
#include "adapod/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario config file (key = value)");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_option("--out", c.out, "output directory");
}

adapod::Configuration load(const Common& c) {
    return c.config.empty() ? adapod::default_configuration() : adapod::load_configuration(c.config);
}

fs::path out_dir(const Common& c, const std::string& sub) {
    return c.out.empty() ? adapod::default_output_root() / sub : fs::path(c.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"POD-Galerkin reduced-order two-phase reservoir simulation with adaptive bases"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "debug logging");

    Common sim_opts;
    std::string sim_basis;
    bool sim_snapshots = false;
    auto* sim = app.add_subcommand("simulate", "run the full model, or the reduced model with --basis");
    add_common(sim, sim_opts);
    sim->add_option("--basis", sim_basis, "basis file; selects the reduced model");
    sim->add_flag("--snapshots", sim_snapshots, "also write the recorded pressure snapshots (full model)");

    Common train_opts;
    std::string train_mode = "local";
    int train_r = 20;
    int train_m = 1000;
    auto* train = app.add_subcommand("train", "train a POD basis from randomized-control runs");
    add_common(train, train_opts);
    train->add_option("--mode", train_mode, "universal or local")->check(CLI::IsMember({"universal", "local"}));
    train->add_option("--components", train_r, "basis size r")->check(CLI::PositiveNumber);
    train->add_option("--snapshots", train_m, "number of snapshots to record")->check(CLI::PositiveNumber);

    Common adapt_opts;
    std::string adapt_basis;
    int adapt_r = 3;
    int adapt_m = 10;
    auto* adapt = app.add_subcommand("adapt", "augment a basis with residual components for the configured wells");
    add_common(adapt, adapt_opts);
    adapt->add_option("--basis", adapt_basis, "base basis file")->required();
    adapt->add_option("--components", adapt_r, "residual components to add")->check(CLI::NonNegativeNumber);
    adapt->add_option("--snapshots", adapt_m, "new snapshots to record")->check(CLI::PositiveNumber);

    Common eval_opts;
    std::string eval_ref;
    std::string eval_pred;
    int eval_points = 200;
    auto* eval = app.add_subcommand("evaluate", "RRSE of a prediction rate CSV against a reference");
    add_common(eval, eval_opts);
    eval->add_option("reference", eval_ref, "reference rates.csv")->required();
    eval->add_option("prediction", eval_pred, "predicted rates.csv")->required();
    eval->add_option("--points", eval_points, "alignment grid size")->check(CLI::Range(2, 1000000));

    Common repro_opts;
    std::string repro_id;
    auto* repro = app.add_subcommand("reproduce", "run an experiment with pinned seeds");
    add_common(repro, repro_opts);
    std::string ids = "experiment id or 'all':";
    for (const auto& id : adapod::experiment_ids()) ids += " " + id;
    repro->add_option("experiment", repro_id, ids)->required();

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    try {
        if (*sim) {
            auto config = load(sim_opts);
            if (sim_opts.seed) config.scenario.seed = *sim_opts.seed;
            std::optional<fs::path> basis;
            if (!sim_basis.empty()) basis = sim_basis;
            const auto r = adapod::cmd_simulate(config, basis, out_dir(sim_opts, "simulate"), sim_snapshots);
            std::cout << r.rates_path.string() << '\n';
        } else if (*train) {
            const auto config = load(train_opts);
            const auto mode = train_mode == "universal" ? adapod::TrainingMode::universal : adapod::TrainingMode::local;
            const auto seed = train_opts.seed.value_or(config.experiments.training_seed);
            const fs::path out = out_dir(train_opts, "train");
            const auto t = adapod::cmd_train(config, mode, train_m, train_r, seed, out);
            std::cout << (out / "basis.txt").string() << " r=" << t.basis.rank()
                      << " energy=" << t.energy[static_cast<std::size_t>(train_r - 1)] << '\n';
        } else if (*adapt) {
            const auto config = load(adapt_opts);
            const auto seed = adapt_opts.seed.value_or(config.experiments.adaptation_seed);
            const fs::path out = out_dir(adapt_opts, "adapt");
            const auto rep = adapod::cmd_adapt(config, adapt_basis, adapt_m, adapt_r, seed, out);
            std::cout << (out / "basis.txt").string() << " r=" << rep.basis.rank() << '\n';
        } else if (*eval) {
            const auto c = adapod::cmd_evaluate(eval_ref, eval_pred, out_dir(eval_opts, "evaluate"), eval_points);
            std::cout << "rrse_oil,rrse_water\n" << c.rrse_oil << ',' << c.rrse_water << '\n';
        } else if (*repro) {
            const auto config = load(repro_opts);
            const auto outcomes = adapod::cmd_reproduce(repro_id, config, repro_opts.seed, out_dir(repro_opts, "reproduce"));
            bool ok = true;
            for (const auto& o : outcomes) {
                std::cout << o.id << ": " << (o.passed() ? "pass" : "fail") << '\n';
                ok = ok && o.passed();
            }
            return ok ? 0 : 3;
        }
    } catch (const adapod::ParseError& e) {
        std::cerr << "config error (line " << e.line() << ", field '" << e.field() << "'): " << e.what() << '\n';
        return 2;
    } catch (const adapod::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const adapod::RankDeficiency& e) {
        std::cerr << "error: " << e.what() << " (achievable rank " << e.achievable_rank() << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
