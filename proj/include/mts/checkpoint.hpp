#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mts/job_list.hpp"

namespace mts {

class Application;

inline constexpr int kCheckpointVersion = 1;

// Totals accumulated before the checkpoint was taken, so a restarted run can
// report figures for the whole computation.
struct CheckpointTotals {
  std::uint64_t output_count = 0;
  std::uint64_t jobs_executed = 0;
  std::uint64_t visited = 0;

  bool empty() const { return output_count == 0 && jobs_executed == 0 && visited == 0; }
  friend bool operator==(const CheckpointTotals&, const CheckpointTotals&) = default;
};

struct CheckpointState {
  std::string app_name;
  std::vector<JobNode> jobs;
  std::vector<std::string> shared;
  CheckpointTotals totals;
};

// Line format:
//   mts-checkpoint 1 <app-name>
//   R <outputs> <jobs> <visited>      (only when totals are nonzero)
//   S <token-base64>                  (one per shared item)
//   N <payload-base64>                (one per pending job)
void write_checkpoint(std::ostream& out, const CheckpointState& state);
// Writes to a temporary sibling and renames it into place. Returns false
// (after printing a warning to stderr) if the file cannot be written.
bool write_checkpoint_file(const std::filesystem::path& path, const CheckpointState& state);

// Throws InputError naming the offending line. When app is given, the
// application name must match and each payload must validate.
CheckpointState read_checkpoint(std::istream& in, const Application* app = nullptr);
CheckpointState read_checkpoint_file(const std::filesystem::path& path,
                                     const Application* app = nullptr);

}  // namespace mts
