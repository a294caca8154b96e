#include "adapod/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <spdlog/spdlog.h>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace fs = std::filesystem;

namespace adapod {

bool ExperimentOutcome::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = {
        "universal-sweep", "local-vs-universal", "mismatch",
        "adapt-azimuth",   "local-from-scratch", "adapt-position",
        "adapt-length",    "sensitivity-snapshots", "sensitivity-components",
    };
    return ids;
}

namespace {

std::string geometry_key(const ProducerGeometry& g) {
    return format_double(g.center.x) + "," + format_double(g.center.y) + "," + format_double(g.azimuth_deg) + "," +
           format_double(g.length);
}

template <class T, class Make>
const T& memo(std::mutex& mutex, std::map<std::string, std::shared_ptr<T>>& cache, const std::string& key, Make make) {
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return *it->second;
    }
    auto value = std::make_shared<T>(make());
    std::lock_guard lock(mutex);
    return *cache.emplace(key, std::move(value)).first->second;
}

}  // namespace

ExperimentContext::ExperimentContext(Configuration config) : config_(std::move(config)) {}

ProducerGeometry ExperimentContext::target_azimuth_geometry() const {
    ProducerGeometry g = base_geometry();
    g.azimuth_deg = config_.experiments.target_azimuth;
    return g;
}

ProducerGeometry ExperimentContext::shifted_geometry() const {
    ProducerGeometry g = base_geometry();
    g.center.x += config_.experiments.position_shift_x;
    g.center.y += config_.experiments.position_shift_y;
    return g;
}

ProducerGeometry ExperimentContext::lengthened_geometry() const {
    ProducerGeometry g = base_geometry();
    g.length = config_.experiments.target_length;
    return g;
}

ScenarioConfig ExperimentContext::scenario_for(const ProducerGeometry& geometry) const {
    ScenarioConfig s = config_.scenario;
    s.producer = geometry;
    s.seed = config_.experiments.evaluation_seed;
    return s;
}

const RateSeries& ExperimentContext::reference(const ProducerGeometry& geometry) {
    return memo(mutex_, references_, geometry_key(geometry), [&] {
        const ScenarioConfig s = scenario_for(geometry);
        const ReservoirModel model = build_model(s);
        SimulationOptions options = simulation_options(s);
        options.keep_trajectory = false;
        auto run = run_simulation(model, build_wells(model, s), evaluation_schedule(s), nullptr, options);
        spdlog::info("reference run {}: {} steps, mass balance {:.2e}", geometry_key(geometry), run.steps,
                     run.balance.relative_error());
        return run.rates;
    });
}

const PodBasis& ExperimentContext::local_basis(const ProducerGeometry& geometry, int snapshots, int r) {
    const std::string key = "local:" + geometry_key(geometry) + ":" + std::to_string(snapshots) + ":" + std::to_string(r);
    return memo(mutex_, bases_, key, [&] {
        return train_basis(scenario_for(geometry), TrainingMode::local, snapshots, r, config_.experiments.training_seed)
            .basis;
    });
}

const PodBasis& ExperimentContext::universal_basis() {
    const auto& ex = config_.experiments;
    const int r = *std::max_element(ex.universal_components.begin(), ex.universal_components.end());
    const std::string key = "universal:" + std::to_string(ex.universal_snapshots) + ":" + std::to_string(r);
    return memo(mutex_, bases_, key, [&] {
        return train_basis(scenario_for(base_geometry()), TrainingMode::universal, ex.universal_snapshots, r,
                           ex.training_seed)
            .basis;
    });
}

const SnapshotMatrix& ExperimentContext::adaptation_snapshots(const ProducerGeometry& geometry, int n) {
    const std::string key = geometry_key(geometry) + ":" + std::to_string(n);
    return memo(mutex_, snapshots_, key, [&] {
        const ScenarioConfig s = scenario_for(geometry);
        const ReservoirModel model = build_model(s);
        const TrainingPlan plan = make_training_plan(TrainingMode::local, control_plan(s, false), n);
        auto campaign = collect_snapshots(model, build_wells(model, s), plan, config_.experiments.adaptation_seed,
                                          "adaptation", simulation_options(s));
        campaign.snapshots.provenance.config_hash = s.hash();
        return campaign.snapshots;
    });
}

PodBasis ExperimentContext::adaptive_basis(const PodBasis& base, const ProducerGeometry& geometry, int n, int r_res) {
    return adapt_from_snapshots(base, adaptation_snapshots(geometry, n), r_res, config_.experiments.adaptation_seed)
        .basis;
}

RomRun ExperimentContext::rom(const PodBasis& basis, const ProducerGeometry& geometry) {
    const ScenarioConfig s = scenario_for(geometry);
    const ReservoirModel model = build_model(s);
    SimulationOptions options = simulation_options(s);
    options.keep_trajectory = false;
    RomRun out;
    try {
        out.rates = run_rom_simulation(model, build_wells(model, s), basis, evaluation_schedule(s), options).run.rates;
    } catch (const BasisInadequate& e) {
        out.failure = e.what();
    } catch (const SolverFailure& e) {
        out.failure = e.what();
    }
    if (out.failure) spdlog::warn("reduced run with {} components failed: {}", basis.rank(), *out.failure);
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
    std::string label;
    double oil = kInf;
    double water = kInf;
};

class Recorder {
public:
    Recorder(ExperimentContext& ctx, ExperimentOutcome& out) : ctx_(ctx), out_(out) {}

    Row evaluate(const std::string& label, const PodBasis& basis, const ProducerGeometry& geometry) {
        const RateSeries& ref = ctx_.reference(geometry);
        const RomRun run = ctx_.rom(basis, geometry);
        Row row{label};
        if (!run.failure) {
            const RateComparison c =
                compare_rates(run.rates, ref, ctx_.config().experiments.alignment_points, label, "full");
            row.oil = c.rrse_oil;
            row.water = c.rrse_water;
            out_.files["rates_" + label + ".csv"] = rates_to_csv(run.rates);
        }
        rows_.push_back(row);
        spdlog::info("{} {}: rrse oil {:.4g}, water {:.4g}", out_.id, label, row.oil, row.water);
        return row;
    }

    void reference(const std::string& label, const ProducerGeometry& geometry) {
        out_.files["rates_" + label + ".csv"] = rates_to_csv(ctx_.reference(geometry));
    }

    void check(const std::string& name, double value, double threshold, bool pass) {
        out_.verdicts.push_back({name, value, threshold, pass});
    }

    /// value <= threshold for both phases.
    void at_most(const std::string& name, const Row& row, double threshold) {
        check(name + "_oil", row.oil, threshold, row.oil <= threshold);
        check(name + "_water", row.water, threshold, row.water <= threshold);
    }

    /// worse >= factor * better for both phases; the value is the ratio.
    void factor(const std::string& name, const Row& worse, const Row& better, double factor) {
        const double ro = worse.oil / better.oil;
        const double rw = worse.water / better.water;
        check(name + "_oil", ro, factor, std::isfinite(better.oil) && ro >= factor);
        check(name + "_water", rw, factor, std::isfinite(better.water) && rw >= factor);
    }

    void finish(const char* table = "rrse.csv") {
        std::vector<SweepRow> rows;
        for (const auto& r : rows_) {
            SweepRow s{r.label, {}};
            s.comparison.rrse_oil = r.oil;
            s.comparison.rrse_water = r.water;
            rows.push_back(std::move(s));
        }
        out_.files[table] = sweep_report(std::move(rows));
    }

private:
    ExperimentContext& ctx_;
    ExperimentOutcome& out_;
    std::vector<Row> rows_;
};

void universal_sweep(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const PodBasis& universal = ctx.universal_basis();
    rec.reference("full", ctx.base_geometry());
    std::map<int, Row> rows;
    for (int r : ex.universal_components)
        rows[r] = rec.evaluate("r" + std::to_string(r), truncate(universal, r), ctx.base_geometry());
    rec.finish();
    std::string energy = "components,energy\n";
    const auto e = energy_spectrum(universal);
    for (std::size_t k = 0; k < e.size(); ++k) energy += std::to_string(k + 1) + "," + format_double(e[k]) + "\n";
    out.files["energy.csv"] = energy;
    if (rows.count(20) && rows.count(100)) {
        const Row& lo = rows[20];
        const Row& hi = rows[100];
        rec.check("r100_below_r20_oil", hi.oil, lo.oil, hi.oil < lo.oil);
        rec.check("r100_below_r20_water", hi.water, lo.water, hi.water < lo.water);
        rec.check("r100_over_r20_oil", hi.oil / lo.oil, ex.universal_ratio, hi.oil <= ex.universal_ratio * lo.oil);
        rec.check("r100_over_r20_water", hi.water / lo.water, ex.universal_ratio,
                  hi.water <= ex.universal_ratio * lo.water);
    }
}

void local_vs_universal(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const int ru = *std::max_element(ex.universal_components.begin(), ex.universal_components.end());
    const int r_universal = std::min(100, ru);
    for (const auto& [name, g] : {std::pair{std::string("base"), ctx.base_geometry()},
                                  std::pair{std::string("target"), ctx.target_azimuth_geometry()}}) {
        rec.reference("full_" + name, g);
        const Row local = rec.evaluate("local_" + name + "_r" + std::to_string(ex.local_components),
                                       ctx.local_basis(g, ex.local_snapshots, ex.local_components), g);
        rec.evaluate("universal_" + name + "_r" + std::to_string(r_universal),
                     truncate(ctx.universal_basis(), r_universal), g);
        rec.at_most("local_" + name + "_rrse", local, ex.local_max_rrse);
    }
    rec.finish();
}

void mismatch(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const auto target = ctx.target_azimuth_geometry();
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    rec.reference("full", target);
    const Row mismatched = rec.evaluate("mismatched_r" + std::to_string(base.rank()), base, target);
    const PodBasis adapted = ctx.adaptive_basis(base, target, ex.adapt_snapshots, ex.adapt_components);
    const Row adaptive = rec.evaluate("adaptive_r" + std::to_string(adapted.rank()), adapted, target);
    rec.finish();
    rec.factor("mismatch_over_adaptive", mismatched, adaptive, ex.mismatch_factor);
    rec.at_most("adaptive_rrse", adaptive, ex.adaptive_max_rrse);
}

void adapt_azimuth(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const auto target = ctx.target_azimuth_geometry();
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    rec.reference("full", target);
    const Row mismatched = rec.evaluate("base_r" + std::to_string(base.rank()), base, target);
    const PodBasis adapted = ctx.adaptive_basis(base, target, ex.adapt_snapshots, ex.adapt_components);
    out.files["basis_lineage.txt"] = adapted.lineage.to_string() + "\n";
    const Row adaptive = rec.evaluate("adaptive_r" + std::to_string(adapted.rank()), adapted, target);
    rec.finish();
    rec.factor("base_over_adaptive", mismatched, adaptive, 1.0);
    rec.at_most("adaptive_rrse", adaptive, ex.adaptive_max_rrse);
}

void local_from_scratch(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const auto target = ctx.target_azimuth_geometry();
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    const SnapshotMatrix& few = ctx.adaptation_snapshots(target, ex.adapt_snapshots);
    rec.reference("full", target);

    const PodBasis adapted = ctx.adaptive_basis(base, target, ex.adapt_snapshots, ex.adapt_components);
    const Eigen::Index achievable = snapshot_svd(few.data).sigma.size();
    const int r_scratch = static_cast<int>(std::min<Eigen::Index>(adapted.rank(), achievable));
    Lineage lineage;
    lineage.config = hex64(few.provenance.config_hash);
    const PodBasis scratch = compute_pod_basis(few.data, r_scratch, lineage);

    const Row adaptive =
        rec.evaluate("adaptive_" + std::to_string(ex.adapt_snapshots) + "snap_r" + std::to_string(adapted.rank()),
                     adapted, target);
    const Row small = rec.evaluate(
        "scratch_" + std::to_string(ex.adapt_snapshots) + "snap_r" + std::to_string(r_scratch), scratch, target);
    rec.evaluate("scratch_" + std::to_string(ex.local_snapshots) + "snap_r" + std::to_string(ex.local_components),
                 ctx.local_basis(target, ex.local_snapshots, ex.local_components), target);
    rec.finish();
    rec.factor("scratch_over_adaptive", small, adaptive, ex.scratch_factor);
}

void adapt_geometry(ExperimentContext& ctx, ExperimentOutcome& out, const ProducerGeometry& target, int snapshots,
                    int components) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    rec.reference("full", target);
    const Row mismatched = rec.evaluate("base_r" + std::to_string(base.rank()), base, target);
    const PodBasis adapted = ctx.adaptive_basis(base, target, snapshots, components);
    out.files["basis_lineage.txt"] = adapted.lineage.to_string() + "\n";
    const Row adaptive = rec.evaluate("adaptive_r" + std::to_string(adapted.rank()), adapted, target);
    rec.finish();
    rec.factor("base_over_adaptive", mismatched, adaptive, 1.0);
}

void sensitivity_snapshots(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const auto target = ctx.target_azimuth_geometry();
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    rec.reference("full", target);
    std::map<int, Row> rows;
    for (int n : ex.sensitivity_snapshots)
        rows[n] = rec.evaluate("snapshots" + std::to_string(n), ctx.adaptive_basis(base, target, n, ex.adapt_components),
                               target);
    rec.finish();
    if (rows.count(10) && rows.count(50)) {
        rec.check("snap50_vs_snap10_oil", rows[50].oil, rows[10].oil, rows[50].oil <= rows[10].oil);
        rec.check("snap50_vs_snap10_water", rows[50].water, rows[10].water, rows[50].water <= rows[10].water);
    }
}

void sensitivity_components(ExperimentContext& ctx, ExperimentOutcome& out) {
    const auto& ex = ctx.config().experiments;
    Recorder rec(ctx, out);
    const auto target = ctx.target_azimuth_geometry();
    const PodBasis& base = ctx.local_basis(ctx.base_geometry(), ex.local_snapshots, ex.local_components);
    rec.reference("full", target);
    std::map<int, Row> rows;
    for (int k : ex.sensitivity_components)
        rows[k] = rec.evaluate("components" + std::to_string(k),
                               ctx.adaptive_basis(base, target, ex.sensitivity_components_snapshots, k), target);
    rec.finish();
    if (rows.count(3) && rows.count(10)) {
        for (const auto& [phase, e3, e10] : {std::tuple{"oil", rows[3].oil, rows[10].oil},
                                             std::tuple{"water", rows[3].water, rows[10].water}}) {
            const double rel = std::abs(e3 - e10) / e10;
            rec.check(std::string("comp3_vs_comp10_") + phase, rel, ex.components_band,
                      std::isfinite(rel) && rel <= ex.components_band);
        }
    }
}

}  // namespace

ExperimentOutcome run_experiment(const std::string& id, ExperimentContext& ctx) {
    ExperimentOutcome out;
    out.id = id;
    const auto& ex = ctx.config().experiments;
    if (id == "universal-sweep") universal_sweep(ctx, out);
    else if (id == "local-vs-universal") local_vs_universal(ctx, out);
    else if (id == "mismatch") mismatch(ctx, out);
    else if (id == "adapt-azimuth") adapt_azimuth(ctx, out);
    else if (id == "local-from-scratch") local_from_scratch(ctx, out);
    else if (id == "adapt-position")
        adapt_geometry(ctx, out, ctx.shifted_geometry(), ex.position_snapshots, ex.position_components);
    else if (id == "adapt-length")
        adapt_geometry(ctx, out, ctx.lengthened_geometry(), ex.length_snapshots, ex.length_components);
    else if (id == "sensitivity-snapshots") sensitivity_snapshots(ctx, out);
    else if (id == "sensitivity-components") sensitivity_components(ctx, out);
    else {
        std::string known;
        for (const auto& k : experiment_ids()) known += " " + k;
        throw InvalidArgument("unknown experiment '" + id + "'; available:" + known);
    }
    return out;
}

void write_outcome(const ExperimentOutcome& outcome, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& [name, text] : outcome.files) write_text(dir / name, text);
    std::string v = "check,value,threshold,verdict\n";
    for (const auto& x : outcome.verdicts)
        v += x.check + "," + format_double(x.value) + "," + format_double(x.threshold) + "," +
             (x.pass ? "pass" : "fail") + "\n";
    write_text(dir / "verdicts.csv", v);
}

std::vector<ExperimentOutcome> cmd_reproduce(const std::string& id, Configuration config,
                                             std::optional<std::uint64_t> seed, const fs::path& out) {
    if (seed) {
        config.experiments.training_seed = episode_seed(*seed, 0);
        config.experiments.evaluation_seed = episode_seed(*seed, 1);
        config.experiments.adaptation_seed = episode_seed(*seed, 2);
    }
    std::vector<std::string> ids;
    if (id == "all") ids = experiment_ids();
    else ids = {id};
    for (const auto& x : ids)
        if (std::find(experiment_ids().begin(), experiment_ids().end(), x) == experiment_ids().end()) {
            std::string known;
            for (const auto& k : experiment_ids()) known += " " + k;
            throw InvalidArgument("unknown experiment '" + x + "'; available:" + known);
        }
    ExperimentContext ctx(std::move(config));
    std::vector<ExperimentOutcome> outcomes;
    for (const auto& x : ids) {
        outcomes.push_back(run_experiment(x, ctx));
        write_outcome(outcomes.back(), out / x);
        for (const auto& v : outcomes.back().verdicts)
            spdlog::info("{} {}: {} (value {:.4g}, threshold {:.4g})", x, v.check, v.pass ? "pass" : "fail", v.value,
                         v.threshold);
    }
    return outcomes;
}

}  // namespace adapod
