#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "laneemden/ground_state.hpp"

namespace laneemden {

/// Text form of p used in file names and reports: "11/4" for exact input, shortest round-trip otherwise.
std::string exponent_text(const CriticalPair& pair);

/// "N{N}_p{p}" with '/' replaced by '_'.
std::string point_tag(const CriticalPair& pair);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Profile CSV (r, u, v, du, dv) and JSON sidecar.
std::string profile_csv(const GroundStateProfile& profile);
std::string profile_sidecar(const GroundStateProfile& profile);

/// Writes gs_{tag}.csv and gs_{tag}.json into dir; returns the CSV path.
std::filesystem::path save_profile(const GroundStateProfile& profile, const std::filesystem::path& dir);

/// Reads a saved profile; nullopt if either file is missing. Throws std::runtime_error on malformed content.
std::optional<GroundStateProfile> load_profile(const std::filesystem::path& dir, const CriticalPair& pair);

struct CacheCheck {
  bool ok = false;
  double residual = 0;
  std::string reason;
};

/// Re-validates a profile by its ODE residual and shape.
CacheCheck validate_profile(const GroundStateProfile& profile, double max_residual = 1e-6);

}  // namespace laneemden
