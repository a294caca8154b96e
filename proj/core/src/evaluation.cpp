#include "adapod/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"

namespace adapod {

double rrse(std::span<const double> prediction, std::span<const double> reference) {
    if (prediction.size() != reference.size())
        throw AlignmentError("prediction has " + std::to_string(prediction.size()) + " samples, reference has " +
                             std::to_string(reference.size()));
    if (reference.size() < 2) throw AlignmentError("at least two samples are needed");
    double mean = 0.0;
    for (double r : reference) mean += r;
    mean /= static_cast<double>(reference.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        num += (prediction[i] - reference[i]) * (prediction[i] - reference[i]);
        den += (reference[i] - mean) * (reference[i] - mean);
    }
    if (!(den > 0.0)) throw UndefinedMetric("reference series is constant; RRSE is undefined");
    return std::sqrt(num / den);
}

double interpolate(std::span<const double> times, std::span<const double> values, double t) {
    if (times.empty() || times.size() != values.size()) throw AlignmentError("malformed series");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[k - 1];
    const double t1 = times[k];
    if (t1 == t0) return values[k];
    const double w = (t - t0) / (t1 - t0);
    return values[k - 1] + w * (values[k] - values[k - 1]);
}

namespace {

void check_series(const RateSeries& s, const char* name) {
    if (s.times.empty()) throw AlignmentError(std::string(name) + " series is empty");
    if (s.water_rate.size() != s.times.size() || s.oil_rate.size() != s.times.size())
        throw AlignmentError(std::string(name) + " series has ragged columns");
    if (!std::is_sorted(s.times.begin(), s.times.end()))
        throw AlignmentError(std::string(name) + " series is not ordered in time");
}

RateSeries resample(const RateSeries& s, const std::vector<double>& grid) {
    RateSeries out;
    out.times = grid;
    out.water_rate.reserve(grid.size());
    out.oil_rate.reserve(grid.size());
    for (double t : grid) {
        out.water_rate.push_back(interpolate(s.times, s.water_rate, t));
        out.oil_rate.push_back(interpolate(s.times, s.oil_rate, t));
    }
    return out;
}

}  // namespace

AlignedSeries align_series(const RateSeries& a, const RateSeries& b, int points) {
    check_series(a, "first");
    check_series(b, "second");
    if (points < 2) throw InvalidArgument("alignment needs at least two grid points");
    const double t0 = std::max(a.times.front(), b.times.front());
    const double t1 = std::min(a.times.back(), b.times.back());
    if (!(t1 > t0)) throw AlignmentError("series do not overlap in time");
    AlignedSeries out;
    out.times.resize(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        out.times[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * static_cast<double>(i) / (points - 1);
    out.times.back() = t1;
    out.a = resample(a, out.times);
    out.b = resample(b, out.times);
    return out;
}

RateComparison compare_rates(const RateSeries& prediction, const RateSeries& reference, int points,
                             std::string prediction_id, std::string reference_id) {
    const AlignedSeries al = align_series(prediction, reference, points);
    RateComparison out;
    out.rrse_oil = rrse(al.a.oil_rate, al.b.oil_rate);
    out.rrse_water = rrse(al.a.water_rate, al.b.water_rate);
    out.times = al.times;
    out.prediction_id = std::move(prediction_id);
    out.reference_id = std::move(reference_id);
    return out;
}

namespace {

std::optional<double> numeric_key(const std::string& label) {
    const auto pos = label.find_first_of("0123456789");
    if (pos == std::string::npos) return std::nullopt;
    auto end = pos;
    while (end < label.size() && (std::isdigit(static_cast<unsigned char>(label[end])) || label[end] == '.')) ++end;
    auto begin = pos;
    if (begin > 0 && label[begin - 1] == '-') --begin;
    try {
        return parse_double(std::string_view(label).substr(begin, end - begin));
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

}  // namespace

std::string sweep_report(std::vector<SweepRow> rows) {
    if (rows.empty()) throw InvalidArgument("sweep has no rows");
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
        const auto kx = numeric_key(x.label);
        const auto ky = numeric_key(y.label);
        if (kx && ky) return *kx < *ky;
        if (kx != ky) return kx.has_value();
        return !kx && x.label < y.label;
    });
    std::ostringstream out;
    out << "label,rrse_oil,rrse_water\n";
    for (const auto& r : rows)
        out << r.label << ',' << format_double(r.comparison.rrse_oil) << ',' << format_double(r.comparison.rrse_water)
            << '\n';
    return out.str();
}

std::vector<SweepEntry> parse_sweep_report(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "label,rrse_oil,rrse_water")
        throw ParseError("sweep report header must be 'label,rrse_oil,rrse_water'", 1, "header");
    std::vector<SweepEntry> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 3) throw ParseError("sweep row needs three fields", line_no, "row");
        out.push_back({f[0], parse_double(f[1]), parse_double(f[2])});
    }
    return out;
}

std::string rates_to_csv(const RateSeries& rates) {
    std::ostringstream out;
    out << "time_s,water_rate_m3s,oil_rate_m3s\n";
    for (std::size_t i = 0; i < rates.size(); ++i)
        out << format_double(rates.times[i]) << ',' << format_double(rates.water_rate[i]) << ','
            << format_double(rates.oil_rate[i]) << '\n';
    return out.str();
}

RateSeries rates_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "time_s,water_rate_m3s,oil_rate_m3s")
        throw ParseError("rate file header must be 'time_s,water_rate_m3s,oil_rate_m3s'", 1, "header");
    RateSeries out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 3) throw ParseError("rate row needs three fields", line_no, "row");
        try {
            out.times.push_back(parse_double(f[0]));
            out.water_rate.push_back(parse_double(f[1]));
            out.oil_rate.push_back(parse_double(f[2]));
        } catch (const InvalidArgument& e) {
            throw ParseError("rate row " + std::to_string(line_no) + ": " + e.what(), line_no, "value");
        }
    }
    return out;
}

void write_rates(const std::filesystem::path& path, const RateSeries& rates) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << rates_to_csv(rates);
}

RateSeries read_rates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read rate file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return rates_from_csv(ss.str());
}

}  // namespace adapod
