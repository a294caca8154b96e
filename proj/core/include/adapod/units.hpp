#pragma once

// SI is used everywhere inside the library. These helpers convert field units
// at the configuration / CLI boundary.
namespace adapod::units {

inline constexpr double bar = 1.0e5;                   // Pa
inline constexpr double millidarcy = 9.869233e-16;     // m^2
inline constexpr double centipoise = 1.0e-3;           // Pa*s
inline constexpr double day = 86400.0;                 // s

constexpr double from_bar(double v) { return v * bar; }
constexpr double to_bar(double v) { return v / bar; }
constexpr double from_md(double v) { return v * millidarcy; }
constexpr double to_md(double v) { return v / millidarcy; }
constexpr double from_cp(double v) { return v * centipoise; }
constexpr double to_cp(double v) { return v / centipoise; }
constexpr double from_days(double v) { return v * day; }
constexpr double to_days(double v) { return v / day; }

}  // namespace adapod::units
