#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace adapod {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parses a full token as a double; throws InvalidArgument otherwise.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

std::vector<std::string> split_whitespace(std::string_view line);
std::vector<std::string> split(std::string_view line, char separator);
std::string_view trim(std::string_view s);

/// 64-bit FNV-1a over raw bytes; used for config and basis fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace adapod
