#include "adapod/fullsim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "adapod/errors.hpp"

namespace adapod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::atomic<long> g_clamp_warnings{0};

double normalized_saturation(double sw, const FluidProperties& fluid) {
    const double span = 1.0 - fluid.connate_water_saturation - fluid.residual_oil_saturation;
    double s = (sw - fluid.connate_water_saturation) / span;
    if (s < 0.0 || s > 1.0) {
        if (s < -1e-9 || s > 1.0 + 1e-9) {
            if (g_clamp_warnings.fetch_add(1) == 0)
                spdlog::warn("water saturation {} outside mobile range, clamping (further warnings suppressed)", sw);
        }
        s = std::clamp(s, 0.0, 1.0);
    }
    return s;
}

}  // namespace

std::vector<Face> face_transmissibilities(const ReservoirModel& model) {
    const Grid& g = model.grid;
    const double h = model.fluid.thickness;
    const auto& k = model.permeability;
    auto harmonic = [&](int a, int b) {
        const double ka = k[static_cast<std::size_t>(a)];
        const double kb = k[static_cast<std::size_t>(b)];
        return 2.0 * ka * kb / (ka + kb);
    };
    std::vector<Face> faces;
    faces.reserve(static_cast<std::size_t>((g.nx - 1) * g.ny + g.nx * (g.ny - 1)));
    for (int r = 0; r < g.ny; ++r)
        for (int c = 0; c + 1 < g.nx; ++c) {
            const int a = g.index(r, c);
            const int b = g.index(r, c + 1);
            faces.push_back({a, b, harmonic(a, b) * g.dy * h / g.dx});
        }
    for (int r = 0; r + 1 < g.ny; ++r)
        for (int c = 0; c < g.nx; ++c) {
            const int a = g.index(r, c);
            const int b = g.index(r + 1, c);
            faces.push_back({a, b, harmonic(a, b) * g.dx * h / g.dy});
        }
    return faces;
}

RelPerm relative_permeability(double sw, const FluidProperties& fluid) {
    const double s = normalized_saturation(sw, fluid);
    return {s * s, (1.0 - s) * (1.0 - s)};
}

Mobility phase_mobility(double sw, const FluidProperties& fluid) {
    const RelPerm kr = relative_permeability(sw, fluid);
    return {kr.krw / fluid.water_viscosity, kr.kro / fluid.oil_viscosity};
}

double fractional_flow(double sw, const FluidProperties& fluid) {
    return phase_mobility(sw, fluid).water_fraction();
}

double max_fractional_flow_slope(const FluidProperties& fluid) {
    const double lo = fluid.min_saturation();
    const double hi = fluid.max_saturation();
    const double span = hi - lo;
    // analytic derivative of S^2 / (S^2 + M (1-S)^2), M = mu_w / mu_o
    const double m = fluid.water_viscosity / fluid.oil_viscosity;
    auto slope = [&](double s) {
        const double den = s * s + m * (1.0 - s) * (1.0 - s);
        return 2.0 * m * s * (1.0 - s) / (den * den) / span;
    };
    constexpr int samples = 4000;
    double best_s = 0.0;
    double best = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        if (const double v = slope(s); v > best) {
            best = v;
            best_s = s;
        }
    }
    // golden-section refinement around the sampled maximum
    double a = std::max(0.0, best_s - 1.0 / samples);
    double b = std::min(1.0, best_s + 1.0 / samples);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double c = b - phi * (b - a);
        const double d = a + phi * (b - a);
        if (slope(c) > slope(d)) b = d; else a = c;
    }
    return std::max(best, slope(0.5 * (a + b)));
}

SimState initial_state(const ReservoirModel& model, double pressure, std::optional<double> water_saturation) {
    const Eigen::Index n = model.grid.cells();
    SimState s;
    s.pressure = Eigen::VectorXd::Constant(n, pressure);
    s.water_saturation = Eigen::VectorXd::Constant(n, water_saturation.value_or(model.fluid.connate_water_saturation));
    s.time = 0.0;
    return s;
}

PressureSystem assemble_pressure_system(const ReservoirModel& model, std::span<const Face> faces,
                                        const WellConfiguration& wells, const SimState& state) {
    const int n = model.grid.cells();
    if (state.pressure.size() != n || state.water_saturation.size() != n)
        throw DimensionMismatch("state size does not match grid");
    const auto& fluid = model.fluid;
    const auto& sw = state.water_saturation;
    const auto& p = state.pressure;

    std::vector<double> cell_mobility(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cell_mobility[static_cast<std::size_t>(i)] = phase_mobility(sw[i], fluid).total();

    PressureSystem sys;
    sys.b = Eigen::VectorXd::Zero(n);
    sys.face_mobility.resize(faces.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) + 4 * faces.size());
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 0.0);

    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        const double la = cell_mobility[static_cast<std::size_t>(face.a)];
        const double lb = cell_mobility[static_cast<std::size_t>(face.b)];
        double lam;
        if (p[face.a] > p[face.b]) lam = la;
        else if (p[face.b] > p[face.a]) lam = lb;
        else lam = 0.5 * (la + lb);
        sys.face_mobility[f] = lam;
        const double c = face.transmissibility * lam;
        trip.emplace_back(face.a, face.a, c);
        trip.emplace_back(face.b, face.b, c);
        trip.emplace_back(face.a, face.b, -c);
        trip.emplace_back(face.b, face.a, -c);
    }

    const double injector_lambda = 1.0 / fluid.water_viscosity;
    sys.injector_mobility.assign(wells.injectors.size(), injector_lambda);
    for (const auto& inj : wells.injectors) {
        const double c = peaceman_well_index(model, inj.cell) * injector_lambda;
        trip.emplace_back(inj.cell, inj.cell, c);
        sys.b[inj.cell] += c * inj.bhp;
    }
    sys.producer_mobility.resize(wells.producer_cells.size());
    for (std::size_t k = 0; k < wells.producer_cells.size(); ++k) {
        const auto& perf = wells.producer_cells[k];
        const double lam = cell_mobility[static_cast<std::size_t>(perf.cell)];
        sys.producer_mobility[k] = lam;
        const double c = perf.well_index * lam;
        trip.emplace_back(perf.cell, perf.cell, c);
        sys.b[perf.cell] += c * wells.producer.bhp;
    }

    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

Eigen::VectorXd PressureSolver::solve(const PressureSystem& system) {
    const auto& A = system.A;
    if (A.rows() != A.cols() || A.rows() != system.b.size()) throw DimensionMismatch("pressure system shape");
    if (!analyzed_ || A.nonZeros() != pattern_nnz_) {
        ldlt_.analyzePattern(A);
        analyzed_ = true;
        pattern_nnz_ = A.nonZeros();
    }
    ldlt_.factorize(A);
    if (ldlt_.info() != Eigen::Success) throw SingularSystem("pressure matrix factorization failed", std::numeric_limits<double>::infinity());

    const Eigen::VectorXd d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    const double cond = dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity();
    if (!(dmin > 1e-12 * dmax))
        throw SingularSystem("pressure matrix is singular (no pressure-controlled well?), pivot ratio " +
                                 std::to_string(cond), cond);

    Eigen::VectorXd x = ldlt_.solve(system.b);
    const double bnorm = system.b.norm();
    const double scale = bnorm > 0.0 ? bnorm : 1.0;
    Eigen::VectorXd r = system.b - A * x;
    double rel = r.norm() / scale;
    for (int it = 0; it < 3 && rel > tolerance; ++it) {
        x += ldlt_.solve(r);
        r = system.b - A * x;
        rel = r.norm() / scale;
    }
    if (!(rel <= tolerance))
        throw SolverFailure("pressure solve residual " + std::to_string(rel) + " above tolerance, pivot ratio " +
                                std::to_string(cond), rel);
    return x;
}

Eigen::VectorXd solve_pressure(const PressureSystem& system) {
    PressureSolver solver;
    return solver.solve(system);
}

FluxField phase_fluxes(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                       const PressureSystem& system, const SimState& state, const Eigen::VectorXd& pressure) {
    const auto& fluid = model.fluid;
    const auto& sw = state.water_saturation;
    if (pressure.size() != model.grid.cells()) throw DimensionMismatch("pressure size does not match grid");
    if (system.face_mobility.size() != faces.size()) throw DimensionMismatch("face mobility size");

    FluxField out;
    out.total.resize(faces.size());
    out.water.resize(faces.size());
    out.oil.resize(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        const double dp = pressure[face.a] - pressure[face.b];
        const double qt = face.transmissibility * system.face_mobility[f] * dp;
        double fw = 0.0;
        if (dp > 0.0) fw = fractional_flow(sw[face.a], fluid);
        else if (dp < 0.0) fw = fractional_flow(sw[face.b], fluid);
        out.total[f] = qt;
        out.water[f] = fw * qt;
        out.oil[f] = qt - out.water[f];
    }

    WellRates& w = out.wells;
    w.injector_water.resize(wells.injectors.size());
    w.injector_total.resize(wells.injectors.size());
    for (std::size_t k = 0; k < wells.injectors.size(); ++k) {
        const auto& inj = wells.injectors[k];
        const double q = peaceman_well_index(model, inj.cell) * system.injector_mobility[k] * (inj.bhp - pressure[inj.cell]);
        // backflow carries the cell's own fluid
        w.injector_total[k] = q;
        w.injector_water[k] = q >= 0.0 ? q : q * fractional_flow(sw[inj.cell], fluid);
        w.water_injection += w.injector_water[k];
    }
    w.producer_total.resize(wells.producer_cells.size());
    w.producer_water.resize(wells.producer_cells.size());
    for (std::size_t k = 0; k < wells.producer_cells.size(); ++k) {
        const auto& perf = wells.producer_cells[k];
        const double q = perf.well_index * system.producer_mobility[k] * (pressure[perf.cell] - wells.producer.bhp);
        const double qw = q * fractional_flow(sw[perf.cell], fluid);
        w.producer_total[k] = q;
        w.producer_water[k] = qw;
        w.water_production += qw;
        w.oil_production += q - qw;
    }
    return out;
}

std::vector<double> cell_outflow(const ReservoirModel& model, std::span<const Face> faces,
                                 const WellConfiguration& wells, const FluxField& fluxes) {
    std::vector<double> out(static_cast<std::size_t>(model.grid.cells()), 0.0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const double q = fluxes.total[f];
        if (q > 0.0) out[static_cast<std::size_t>(faces[f].a)] += q;
        else out[static_cast<std::size_t>(faces[f].b)] -= q;
    }
    for (std::size_t k = 0; k < wells.producer_cells.size(); ++k) {
        const double q = fluxes.wells.producer_total[k];
        if (q > 0.0) out[static_cast<std::size_t>(wells.producer_cells[k].cell)] += q;
    }
    for (std::size_t k = 0; k < wells.injectors.size(); ++k) {
        const double q = fluxes.wells.injector_total[k];
        if (q < 0.0) out[static_cast<std::size_t>(wells.injectors[k].cell)] -= q;
    }
    return out;
}

double stable_dt(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                 const FluxField& fluxes, const TimeStepOptions& options, double max_slope) {
    const auto out = cell_outflow(model, faces, wells, fluxes);
    double limit = std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.grid.cells(); ++i) {
        const double q = out[static_cast<std::size_t>(i)];
        if (q > 0.0) limit = std::min(limit, model.pore_volume(i) / (q * max_slope));
    }
    return std::min(options.dt_max, options.cfl_factor * limit);
}

SimState saturation_step(const ReservoirModel& model, std::span<const Face> faces, const WellConfiguration& wells,
                         const SimState& state, const FluxField& fluxes, double dt, double max_slope,
                         SaturationStepReport* report) {
    if (dt < 0.0) throw InvalidArgument("negative time step");
    const double limit = stable_dt(model, faces, wells, fluxes, {1.0, std::numeric_limits<double>::infinity()}, max_slope);
    if (dt > limit * (1.0 + 1e-9))
        throw StabilityError("time step " + std::to_string(dt) + " s exceeds explicit stability limit " +
                             std::to_string(limit) + " s");

    const int n = model.grid.cells();
    Eigen::VectorXd net = Eigen::VectorXd::Zero(n);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        net[faces[f].a] -= fluxes.water[f];
        net[faces[f].b] += fluxes.water[f];
    }
    for (std::size_t k = 0; k < wells.injectors.size(); ++k) net[wells.injectors[k].cell] += fluxes.wells.injector_water[k];
    for (std::size_t k = 0; k < wells.producer_cells.size(); ++k)
        net[wells.producer_cells[k].cell] -= fluxes.wells.producer_water[k];

    SimState next;
    next.pressure = state.pressure;
    next.water_saturation.resize(n);
    next.time = state.time + dt;
    const double lo = model.fluid.min_saturation();
    const double hi = model.fluid.max_saturation();
    double clamped = 0.0;
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pv = model.pore_volume(i);
        const double raw = state.water_saturation[i] + dt * net[i] / pv;
        const double s = std::clamp(raw, lo, hi);
        clamped += std::abs(raw - s) * pv;
        change += (s - state.water_saturation[i]) * pv;
        next.water_saturation[i] = s;
    }
    if (report) {
        report->clamped_volume += clamped;
        report->water_volume_change += change;
    }
    return next;
}

SnapshotRecorder::SnapshotRecorder(int stride, int max_snapshots) : stride_(stride), max_snapshots_(max_snapshots) {
    if (stride < 1) throw InvalidArgument("recording stride must be >= 1");
}

void SnapshotRecorder::offer(long step, const Eigen::VectorXd& pressure) {
    if (full() || step % stride_ != 0) return;
    snapshots_.push_back(pressure);
}

double MassBalance::relative_error() const {
    const double delta = final_water_in_place - initial_water_in_place;
    const double scale = std::max({std::abs(injected_water), std::abs(delta), 1e-300});
    return std::abs(injected_water - produced_water - delta) / scale;
}

double water_in_place(const ReservoirModel& model, const Eigen::VectorXd& saturation) {
    double sum = 0.0;
    for (int i = 0; i < model.grid.cells(); ++i) sum += model.pore_volume(i) * saturation[i];
    return sum;
}

SimulationResult run_simulation(const ReservoirModel& model, const WellConfiguration& wells, const Schedule& schedule,
                                SnapshotRecorder* recorder, const SimulationOptions& options) {
    FullPressureStage stage;
    return run_impes(model, wells, schedule, stage, recorder, options);
}

SimulationResult run_impes(const ReservoirModel& model, const WellConfiguration& wells, const Schedule& schedule,
                           PressureStage& stage, SnapshotRecorder* recorder, const SimulationOptions& options) {
    validate_schedule(schedule, wells.injectors.size());
    const auto run_start = Clock::now();
    const auto faces = face_transmissibilities(model);
    const double slope = max_fractional_flow_slope(model.fluid);

    SimulationResult result;
    SimState state = initial_state(model, wells.producer.bhp);
    state.time = schedule.start_time();
    result.balance.initial_water_in_place = water_in_place(model, state.water_saturation);
    if (options.keep_trajectory) result.trajectory.push_back(state);

    WellConfiguration current = wells;
    SaturationStepReport transport_report;
    long step = 0;
    bool stop = false;
    for (const auto& iv : schedule.intervals) {
        if (stop) break;
        if (iv.producer) current = with_producer_geometry(model, current, *iv.producer);
        for (std::size_t k = 0; k < current.injectors.size(); ++k) current.injectors[k].bhp = iv.injector_bhp[k];

        double t = iv.t_start;
        while (t < iv.t_end) {
            auto t0 = Clock::now();
            const PressureSystem sys = assemble_pressure_system(model, faces, current, state);
            result.timers.assembly_s += seconds_since(t0);

            t0 = Clock::now();
            Eigen::VectorXd p = stage.solve(sys);
            result.timers.pressure_solve_s += seconds_since(t0);

            t0 = Clock::now();
            const FluxField fl = phase_fluxes(model, faces, current, sys, state, p);
            double dt = stable_dt(model, faces, current, fl, options.time_step, slope);
            const double remaining = iv.t_end - t;
            bool last = false;
            if (remaining <= dt) {
                dt = remaining;
                last = true;
            } else if (remaining < 2.0 * dt) {
                dt = 0.5 * remaining;
            }
            SimState next = saturation_step(model, faces, current, state, fl, dt, slope, &transport_report);
            next.pressure = std::move(p);
            t = last ? iv.t_end : t + dt;
            next.time = t;
            result.timers.transport_s += seconds_since(t0);

            result.balance.injected_water += fl.wells.water_injection * dt;
            result.balance.produced_water += fl.wells.water_production * dt;
            result.rates.times.push_back(t);
            result.rates.water_rate.push_back(fl.wells.water_production);
            result.rates.oil_rate.push_back(fl.wells.oil_production);

            state = std::move(next);
            ++step;
            if (recorder) recorder->offer(step, state.pressure);
            if (options.keep_trajectory && step % schedule.recording_stride == 0) result.trajectory.push_back(state);
            if (recorder && recorder->full()) {
                stop = true;
                break;
            }
        }
    }
    if (options.keep_trajectory && (result.trajectory.empty() || result.trajectory.back().time != state.time))
        result.trajectory.push_back(state);
    result.steps = step;
    result.balance.final_water_in_place = water_in_place(model, state.water_saturation);
    result.balance.clamped_volume = transport_report.clamped_volume;
    result.timers.total_s = seconds_since(run_start);
    return result;
}

}  // namespace adapod
