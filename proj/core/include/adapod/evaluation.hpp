#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adapod/fullsim.hpp"

namespace adapod {

/// Root relative squared error sqrt(sum (p_i - r_i)^2 / sum (r_i - mean r)^2).
/// Throws AlignmentError for unequal lengths or fewer than two samples and
/// UndefinedMetric for a constant reference.
double rrse(std::span<const double> prediction, std::span<const double> reference);

struct AlignedSeries {
    std::vector<double> times;
    RateSeries a;
    RateSeries b;
};

/// Linear interpolation of both series onto `points` uniform times spanning
/// the overlap of their time ranges.
AlignedSeries align_series(const RateSeries& a, const RateSeries& b, int points = 200);

/// Piecewise-linear value of a sampled curve at t (constant past the ends).
double interpolate(std::span<const double> times, std::span<const double> values, double t);

struct RateComparison {
    double rrse_oil = 0.0;
    double rrse_water = 0.0;
    std::vector<double> times;
    std::string reference_id;
    std::string prediction_id;
};

RateComparison compare_rates(const RateSeries& prediction, const RateSeries& reference, int points = 200,
                             std::string prediction_id = "prediction", std::string reference_id = "reference");

struct SweepRow {
    std::string label;
    RateComparison comparison;
};

/// "label,rrse_oil,rrse_water" rows ordered by the numeric value in each label
/// (labels without digits sort last, by text).
std::string sweep_report(std::vector<SweepRow> rows);

struct SweepEntry {
    std::string label;
    double rrse_oil = 0.0;
    double rrse_water = 0.0;
};
std::vector<SweepEntry> parse_sweep_report(const std::string& csv);

// Rate CSV: header "time_s,water_rate_m3s,oil_rate_m3s", one row per step.
std::string rates_to_csv(const RateSeries& rates);
RateSeries rates_from_csv(const std::string& csv);
void write_rates(const std::filesystem::path& path, const RateSeries& rates);
RateSeries read_rates(const std::filesystem::path& path);

}  // namespace adapod
