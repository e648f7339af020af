#include "echotdoa/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "echotdoa/format.hpp"
#include "echotdoa/version.hpp"

namespace echotdoa {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path,
                             std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("failed while writing '" + path.string() + "'");
  }
}

}  // namespace

void write_grid_csv(const GridResult& result,
                    const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "x_m,y_m,error_fraction\n";
  for (const GridPoint& p : result.points) {
    out << format_double(p.x_m) << ',' << format_double(p.y_m) << ','
        << format_double(p.error_fraction) << '\n';
  }
  finish_write(out, path);
}

void write_trials_csv(const GridResult& result,
                      const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "x_m,y_m,latency_s,error\n";
  for (const TrialRecord& t : result.per_trial_errors) {
    out << format_double(t.x_m) << ',' << format_double(t.y_m) << ','
        << format_double(t.latency_s) << ',' << format_double(t.error) << '\n';
  }
  finish_write(out, path);
}

void write_cdf_csv(std::span<const std::pair<double, double>> cdf,
                   const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "error_m,probability\n";
  for (const auto& [err, prob] : cdf) {
    out << format_double(err) << ',' << format_double(prob) << '\n';
  }
  finish_write(out, path);
}

void write_heatmap_pgm(const GridResult& result,
                       const std::filesystem::path& path) {
  if (result.nx == 0 || result.ny == 0 ||
      result.points.size() != result.nx * result.ny) {
    throw std::invalid_argument("grid result has inconsistent dimensions");
  }
  std::ofstream out = open_for_write(path, std::ios::out | std::ios::binary);
  out << "P5\n" << result.nx << ' ' << result.ny << "\n255\n";
  // Top row is the largest y; white means no error events.
  for (std::size_t row = 0; row < result.ny; ++row) {
    std::size_t iy = result.ny - 1 - row;
    for (std::size_t ix = 0; ix < result.nx; ++ix) {
      double f = result.points[iy * result.nx + ix].error_fraction;
      long v = std::lround(255.0 * (1.0 - f));
      out.put(static_cast<char>(std::clamp(v, 0L, 255L)));
    }
  }
  finish_write(out, path);
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "tool_version: " << manifest.tool_version << '\n';
  out << "master_seed: " << manifest.master_seed << '\n';
  out << "wall_seconds: " << format_double(manifest.wall_seconds) << '\n';
  out << "outputs:";
  for (const std::string& f : manifest.output_files) {
    out << ' ' << f;
  }
  out << '\n';
  out << "config:\n";
  std::size_t pos = 0;
  while (pos < manifest.config_echo.size()) {
    std::size_t eol = manifest.config_echo.find('\n', pos);
    if (eol == std::string::npos) {
      eol = manifest.config_echo.size();
    }
    out << "  " << manifest.config_echo.substr(pos, eol - pos) << '\n';
    pos = eol + 1;
  }
  finish_write(out, path);
}

RunManifest run_and_write(const ExperimentConfig& config,
                          const std::filesystem::path& out_dir,
                          const WriteOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);

  GridResult result = grid_sweep(config);

  // The CDF abscissa is meters; tdoa-mode errors are seconds and are
  // scaled by the propagation speed.
  std::vector<double> errors;
  errors.reserve(result.per_trial_errors.size());
  double scale = config.mode == ExperimentMode::tdoa_2anchor
                     ? config.scene.speed_of_sound
                     : 1.0;
  for (const TrialRecord& t : result.per_trial_errors) {
    errors.push_back(scale * t.error);
  }
  auto cdf = empirical_cdf(errors);

  RunManifest manifest;
  manifest.config_echo = result.metadata;
  manifest.tool_version = kVersion;
  manifest.master_seed = config.master_seed;

  std::vector<std::filesystem::path> written;
  try {
    write_grid_csv(result, out_dir / "grid.csv");
    written.push_back(out_dir / "grid.csv");
    manifest.output_files.push_back("grid.csv");

    write_trials_csv(result, out_dir / "trials.csv");
    written.push_back(out_dir / "trials.csv");
    manifest.output_files.push_back("trials.csv");

    write_cdf_csv(cdf, out_dir / "cdf.csv");
    written.push_back(out_dir / "cdf.csv");
    manifest.output_files.push_back("cdf.csv");

    if (options.heatmap) {
      write_heatmap_pgm(result, out_dir / "heatmap.pgm");
      written.push_back(out_dir / "heatmap.pgm");
      manifest.output_files.push_back("heatmap.pgm");
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_manifest(manifest, out_dir / "manifest.txt");
    written.push_back(out_dir / "manifest.txt");
    manifest.output_files.push_back("manifest.txt");
  } catch (...) {
    // Never leave a partially written run behind.
    for (const auto& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    throw;
  }
  return manifest;
}

}  // namespace echotdoa
