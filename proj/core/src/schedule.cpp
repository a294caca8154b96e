#include "adapod/schedule.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "adapod/errors.hpp"
#include "adapod/text_format.hpp"
#include "adapod/units.hpp"

namespace adapod {

void validate_schedule(const Schedule& schedule, std::size_t injector_count) {
    if (schedule.recording_stride < 1) throw InvalidArgument("recording stride must be >= 1");
    for (std::size_t k = 0; k < schedule.intervals.size(); ++k) {
        const auto& iv = schedule.intervals[k];
        if (!(iv.t_end >= iv.t_start)) throw InvalidArgument("interval " + std::to_string(k) + " ends before it starts");
        if (k > 0 && iv.t_start != schedule.intervals[k - 1].t_end)
            throw InvalidArgument("interval " + std::to_string(k) + " is not contiguous with its predecessor");
        if (iv.injector_bhp.size() != injector_count)
            throw InvalidArgument("interval " + std::to_string(k) + " lists " + std::to_string(iv.injector_bhp.size()) +
                                  " injector BHPs, expected " + std::to_string(injector_count));
    }
}

Schedule constant_schedule(double total_time, std::vector<double> injector_bhp, int recording_stride) {
    Schedule s;
    s.recording_stride = recording_stride;
    s.intervals.push_back({0.0, total_time, std::move(injector_bhp), std::nullopt});
    return s;
}

Schedule random_schedule(const ControlPlan& plan, std::uint64_t seed) {
    if (!(plan.interval_length > 0.0)) throw InvalidArgument("control interval length must be positive");
    if (plan.bhp_max < plan.bhp_min) throw InvalidArgument("BHP range is inverted");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> bhp(plan.bhp_min, plan.bhp_max);
    std::uniform_real_distribution<double> azimuth(0.0, 180.0);

    Schedule s;
    s.recording_stride = plan.recording_stride;
    const auto count = static_cast<long>(std::ceil(plan.total_time / plan.interval_length - 1e-12));
    for (long k = 0; k < count; ++k) {
        ControlInterval iv;
        iv.t_start = static_cast<double>(k) * plan.interval_length;
        iv.t_end = std::min(plan.total_time, static_cast<double>(k + 1) * plan.interval_length);
        iv.injector_bhp.resize(plan.injector_count);
        for (auto& p : iv.injector_bhp) p = bhp(rng);
        if (plan.randomize_azimuth) {
            ProducerGeometry g = plan.base_geometry;
            g.azimuth_deg = azimuth(rng);
            iv.producer = g;
        }
        s.intervals.push_back(std::move(iv));
    }
    return s;
}

std::string schedule_to_text(const Schedule& schedule) {
    std::ostringstream out;
    out << "# times in days, pressures in bar\n";
    out << "stride " << schedule.recording_stride << '\n';
    for (const auto& iv : schedule.intervals) {
        out << "interval " << format_double(units::to_days(iv.t_start)) << ' ' << format_double(units::to_days(iv.t_end))
            << " bhp";
        for (double p : iv.injector_bhp) out << ' ' << format_double(units::to_bar(p));
        if (iv.producer) {
            out << " producer " << format_double(iv.producer->center.x) << ' ' << format_double(iv.producer->center.y)
                << ' ' << format_double(iv.producer->azimuth_deg) << ' ' << format_double(iv.producer->length);
        }
        out << '\n';
    }
    return out.str();
}

Schedule schedule_from_text(const std::string& text) {
    Schedule s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto tok = split_whitespace(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "stride") {
                if (tok.size() != 2) throw ParseError("stride takes one value", line_no, "stride");
                s.recording_stride = static_cast<int>(parse_integer(tok[1]));
            } else if (tok[0] == "interval") {
                if (tok.size() < 4 || tok[3] != "bhp") throw ParseError("expected 'interval t0 t1 bhp ...'", line_no, "interval");
                ControlInterval iv;
                iv.t_start = units::from_days(parse_double(tok[1]));
                iv.t_end = units::from_days(parse_double(tok[2]));
                std::size_t k = 4;
                for (; k < tok.size() && tok[k] != "producer"; ++k) iv.injector_bhp.push_back(units::from_bar(parse_double(tok[k])));
                if (k < tok.size()) {
                    if (tok.size() != k + 5) throw ParseError("producer needs x y azimuth length", line_no, "producer");
                    iv.producer = ProducerGeometry{{parse_double(tok[k + 1]), parse_double(tok[k + 2])},
                                                   parse_double(tok[k + 3]), parse_double(tok[k + 4])};
                }
                s.intervals.push_back(std::move(iv));
            } else {
                throw ParseError("unknown schedule keyword '" + tok[0] + "'", line_no, tok[0]);
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(std::string("schedule line ") + std::to_string(line_no) + ": " + e.what(), line_no, tok[0]);
        }
    }
    return s;
}

void write_schedule(const std::filesystem::path& path, const Schedule& schedule) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << schedule_to_text(schedule);
}

Schedule read_schedule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return schedule_from_text(ss.str());
}

}  // namespace adapod
