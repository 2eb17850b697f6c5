#include "mts/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <stdexcept>

namespace mts {

void write_histogram_csv(std::ostream& out, const RunMetrics& metrics) {
  out << "elapsed_seconds,busy_workers,joblist_len\n";
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(3);
  for (const auto& s : metrics.samples)
    out << s.elapsed_seconds << ',' << s.busy_workers << ',' << s.joblist_len << '\n';
  out.flags(flags);
}

void write_frequencies(std::ostream& out, const RunMetrics& metrics) {
  for (auto f : metrics.frequencies) out << f << '\n';
}

namespace {

template <typename Writer>
bool write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::trunc);
  if (out) {
    writer(out);
    out.flush();
  }
  if (!out) {
    std::cerr << "warning: cannot write " << path << '\n';
    return false;
  }
  return true;
}

}  // namespace

bool emit_histograms(const RunMetrics& metrics, const MetricsPaths& paths) {
  bool ok = true;
  if (paths.histogram)
    ok &= write_file(*paths.histogram, [&](std::ostream& o) { write_histogram_csv(o, metrics); });
  if (paths.frequency)
    ok &= write_file(*paths.frequency, [&](std::ostream& o) { write_frequencies(o, metrics); });
  return ok;
}

EfficiencyRecord compute_efficiency(double single_seconds, int cores, double multi_seconds) {
  if (!(single_seconds > 0.0) || cores <= 0 || !(multi_seconds > 0.0))
    throw std::invalid_argument("efficiency inputs must be positive");
  const double efficiency = single_seconds / (static_cast<double>(cores) * multi_seconds);
  return {single_seconds, cores, multi_seconds, efficiency, efficiency * cores};
}

}  // namespace mts
