#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echotdoa/experiment.hpp"

namespace echotdoa {

/// Record of one completed run: what was produced and from what input.
struct RunManifest {
  std::string config_echo;
  std::string tool_version;
  std::uint64_t master_seed = 0;
  std::vector<std::string> output_files;  // names relative to the out dir
  double wall_seconds = 0.0;
};

struct WriteOptions {
  bool heatmap = false;
};

/// Runs the configured sweep and writes grid.csv, trials.csv, cdf.csv,
/// optionally heatmap.pgm, and manifest.txt into out_dir.  Numeric
/// fields are written with 9 significant digits, locale-independent, so
/// identical configs give byte-identical files.  Partially written
/// outputs are removed if anything fails.
RunManifest run_and_write(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir,
                          const WriteOptions& options = {});

/// Individual writers (exposed for tests).
void write_grid_csv(const GridResult& result, const std::filesystem::path& path);
void write_trials_csv(const GridResult& result,
                      const std::filesystem::path& path);
void write_cdf_csv(std::span<const std::pair<double, double>> cdf,
                   const std::filesystem::path& path);

/// 8-bit binary PGM of the error-fraction map: white = fraction 0,
/// black = fraction 1, top row = largest y.
void write_heatmap_pgm(const GridResult& result,
                       const std::filesystem::path& path);

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace echotdoa
