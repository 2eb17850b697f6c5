#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "mts/apps/topsorts.hpp"
#include "mts/checkpoint.hpp"
#include "mts/error.hpp"

using namespace mts;

namespace {

CheckpointState parse(const std::string& text, const Application* app = nullptr) {
  std::istringstream in(text);
  return read_checkpoint(in, app);
}

std::size_t error_line(const std::string& text, const Application* app = nullptr) {
  try {
    parse(text, app);
  } catch (const InputError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("empty job list writes only the header") {
  std::ostringstream out;
  write_checkpoint(out, {"topsorts", {}, {}, {}});
  CHECK(out.str() == "mts-checkpoint 1 topsorts\n");
  const auto state = parse(out.str());
  CHECK(state.app_name == "topsorts");
  CHECK(state.jobs.empty());
  CHECK(state.totals.empty());
}

TEST_CASE("round trip keeps order, shared data and totals") {
  CheckpointState state{"sat", {{std::string("\0\1\2", 3)}, {"xyz"}}, {"-3", "7"}, {5, 9, 120}};
  std::ostringstream out;
  write_checkpoint(out, state);
  CHECK(out.str() == "mts-checkpoint 1 sat\nR 5 9 120\nS LTM=\nS Nw==\nN AAEC\nN eHl6\n");
  const auto back = parse(out.str());
  CHECK(back.jobs == state.jobs);
  CHECK(back.shared == state.shared);
  CHECK(back.totals == state.totals);
}

TEST_CASE("malformed checkpoints name the line") {
  CHECK(error_line("") == 1);
  CHECK(error_line("mts-checkpoint 2 sat\n") == 1);
  CHECK(error_line("mts-checkpoint 1 sat\nN AAEC\nN ***\n") == 3);
  CHECK(error_line("mts-checkpoint 1 sat\nN AAEC\nS AAEC\n") == 3);
  CHECK(error_line("mts-checkpoint 1 sat\nQ AAEC\n") == 2);
  CHECK(error_line("mts-checkpoint 1 sat\nR 1 2\n") == 2);
}

TEST_CASE("nodes are validated against the instance") {
  topsorts::Application app;
  app.init("3 1\n1 2\n");
  CHECK(error_line("mts-checkpoint 1 spantree\n", &app) == 1);
  // Element 2 before element 1 violates the relation.
  const std::string bad = "mts-checkpoint 1 topsorts\nN " + std::string("AQAAAAIA") + "\n";
  CHECK(error_line(bad, &app) == 2);
  const std::string good = "mts-checkpoint 1 topsorts\nN AAABAAIA\n";
  CHECK(parse(good, &app).jobs.size() == 1);
}

TEST_CASE("file round trip and unwritable path") {
  const auto path = std::filesystem::temp_directory_path() / "mts_unit_checkpoint.txt";
  CheckpointState state{"topsorts", {{"ab"}}, {}, {}};
  CHECK(write_checkpoint_file(path, state));
  CHECK(read_checkpoint_file(path).jobs == state.jobs);
  std::filesystem::remove(path);
  CHECK_FALSE(write_checkpoint_file("/nonexistent-dir/x/cp.txt", state));
  CHECK_THROWS_AS(read_checkpoint_file("/nonexistent-dir/x/cp.txt"), InputError);
}
