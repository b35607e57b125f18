#pragma once

#include <cdfo/interpolation_set.hpp>
#include <cdfo/models.hpp>
#include <cdfo/poisedness.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace cdfo::harness {

/// Malformed or unreadable input file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"base": [...], "radius": r, "points": [[...], ...], "values": [...]}; values optional.
InterpolationSet read_set(const std::filesystem::path& path);
InterpolationSet parse_set(const std::string& json_text);
std::string format_set(const InterpolationSet& set);
void write_set(const std::filesystem::path& path, const InterpolationSet& set);

/// {"c": c, "g": [...], "H": [[...], ...], "base": [...]}
std::string format_model(const QuadraticModel& model);
void write_model(const std::filesystem::path& path, const QuadraticModel& model);
QuadraticModel parse_model(const std::string& json_text);

/// Array of swap records with log-determinants.
std::string format_swap_log(const std::vector<SwapRecord>& swaps);
void write_swap_log(const std::filesystem::path& path, const std::vector<SwapRecord>& swaps);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Output directory from CDFO_OUT_DIR, else the current directory.
std::filesystem::path default_output_dir();

}  // namespace cdfo::harness
