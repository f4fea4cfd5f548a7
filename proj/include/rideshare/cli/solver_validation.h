#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rideshare/reposition/fdr_model.h"

namespace rideshare::cli {

// A random tiny repositioning model: at most 4 areas, at most 3 idle vehicles
// per area, integer forecasts up to 3 and a random coverage radius.
reposition::FdrModel random_fdr_instance(std::mt19937_64& rng);

struct ValidationReport {
  int count = 0;
  int mismatches = 0;
  double max_deviation = 0.0;
  double seconds = 0.0;
  std::vector<std::filesystem::path> dumps;
};

// Compares solve_mip with brute_force_solve on `count` instances drawn from
// `seed`. Mismatching instances are written to dump_dir in the plain-text
// model format.
ValidationReport validate_solver(int count, std::uint64_t seed,
                                 const std::filesystem::path& dump_dir);

inline constexpr double kValidationTolerance = 1e-6;

}  // namespace rideshare::cli
