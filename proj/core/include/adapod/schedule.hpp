#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adapod/wells.hpp"

namespace adapod {

/// One control period. Injector BHPs (Pa) are listed in injector order; an
/// optional producer geometry reconfigures the producer for the interval.
struct ControlInterval {
    double t_start = 0.0;  // s
    double t_end = 0.0;    // s
    std::vector<double> injector_bhp;
    std::optional<ProducerGeometry> producer;
};

struct Schedule {
    std::vector<ControlInterval> intervals;
    int recording_stride = 10;

    double start_time() const { return intervals.empty() ? 0.0 : intervals.front().t_start; }
    double end_time() const { return intervals.empty() ? 0.0 : intervals.back().t_end; }
};

/// Contiguous, increasing intervals with one BHP per injector.
void validate_schedule(const Schedule& schedule, std::size_t injector_count);

/// Constant controls over [0, total_time].
Schedule constant_schedule(double total_time, std::vector<double> injector_bhp, int recording_stride);

/// Randomized control generator. Injector BHPs are drawn i.i.d. uniform over
/// [bhp_min, bhp_max] for every interval; with randomize_azimuth the producer
/// azimuth is drawn uniform over [0, 180) for every interval, keeping the base
/// center and length.
struct ControlPlan {
    double total_time = 0.0;
    double interval_length = 0.0;
    std::size_t injector_count = 4;
    double bhp_min = 0.0;
    double bhp_max = 0.0;
    bool randomize_azimuth = false;
    ProducerGeometry base_geometry;
    int recording_stride = 10;
};

Schedule random_schedule(const ControlPlan& plan, std::uint64_t seed);

/// Text format, one interval per line, times in days and pressures in bar:
///   stride <steps>
///   interval <t_start> <t_end> bhp <b1> ... [producer <x_m> <y_m> <azimuth_deg> <length_m>]
void write_schedule(const std::filesystem::path& path, const Schedule& schedule);
Schedule read_schedule(const std::filesystem::path& path);
std::string schedule_to_text(const Schedule& schedule);
Schedule schedule_from_text(const std::string& text);

}  // namespace adapod
