#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mts {

struct HistogramSample {
  double elapsed_seconds = 0.0;
  int busy_workers = 0;
  std::size_t joblist_len = 0;
};

// Instrumentation gathered by the master during a run.
struct RunMetrics {
  std::vector<HistogramSample> samples;
  // Budget units consumed per job, in completion order.
  std::vector<std::uint64_t> frequencies;
};

// elapsed_seconds,busy_workers,joblist_len with a header row.
void write_histogram_csv(std::ostream& out, const RunMetrics& metrics);
// One decimal integer per line, one line per job.
void write_frequencies(std::ostream& out, const RunMetrics& metrics);

struct MetricsPaths {
  std::optional<std::filesystem::path> histogram;
  std::optional<std::filesystem::path> frequency;
};

// Writes the requested files. Unwritable paths produce a warning on stderr;
// returns false if any file could not be written.
bool emit_histograms(const RunMetrics& metrics, const MetricsPaths& paths);

struct EfficiencyRecord {
  double single_seconds;
  int cores;
  double multi_seconds;
  double efficiency;
  double speedup;
};

// efficiency = single / (cores * multi); speedup = efficiency * cores.
// Throws std::invalid_argument for nonpositive inputs.
EfficiencyRecord compute_efficiency(double single_seconds, int cores, double multi_seconds);

}  // namespace mts
