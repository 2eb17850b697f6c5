#include "mts/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mts/codec.hpp"
#include "mts/error.hpp"
#include "mts/search_api.hpp"

namespace mts {

void write_checkpoint(std::ostream& out, const CheckpointState& state) {
  out << "mts-checkpoint " << kCheckpointVersion << ' ' << state.app_name << '\n';
  if (!state.totals.empty())
    out << "R " << state.totals.output_count << ' ' << state.totals.jobs_executed << ' '
        << state.totals.visited << '\n';
  for (const auto& token : state.shared) out << "S " << base64_encode(token) << '\n';
  for (const auto& job : state.jobs) out << "N " << base64_encode(job.payload) << '\n';
}

bool write_checkpoint_file(const std::filesystem::path& path, const CheckpointState& state) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      std::cerr << "warning: cannot write checkpoint " << path << '\n';
      return false;
    }
    write_checkpoint(out, state);
    out.flush();
    if (!out) {
      std::cerr << "warning: failed writing checkpoint " << path << '\n';
      return false;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::cerr << "warning: cannot move checkpoint into place at " << path << ": " << ec.message()
              << '\n';
    return false;
  }
  return true;
}

namespace {

std::uint64_t parse_u64(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError(line, "expected a nonnegative integer, got '" + std::string(text) + "'");
  return value;
}

}  // namespace

CheckpointState read_checkpoint(std::istream& in, const Application* app) {
  CheckpointState state;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw InputError(1, "empty checkpoint file");
  ++line_no;
  {
    std::istringstream header(line);
    std::string magic, name, extra;
    int version = 0;
    if (!(header >> magic >> version >> name) || magic != "mts-checkpoint" || (header >> extra))
      throw InputError(line_no, "bad checkpoint header");
    if (version != kCheckpointVersion)
      throw InputError(line_no, "unsupported checkpoint version " + std::to_string(version));
    if (app != nullptr && name != app->descriptor().name)
      throw InputError(line_no,
                       "checkpoint belongs to application '" + name + "', not '" +
                           app->descriptor().name + "'");
    state.app_name = std::move(name);
  }

  // Sections must appear in order R, S, N.
  int section = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.size() < 2 || line[1] != ' ') throw InputError(line_no, "malformed checkpoint line");
    const char tag = line[0];
    const std::string_view body = std::string_view(line).substr(2);
    if (tag == 'R') {
      if (section > 0) throw InputError(line_no, "totals line out of order");
      section = 1;
      std::istringstream fields{std::string(body)};
      std::string a, b, c, extra;
      if (!(fields >> a >> b >> c) || (fields >> extra))
        throw InputError(line_no, "totals line needs three fields");
      state.totals = {parse_u64(a, line_no), parse_u64(b, line_no), parse_u64(c, line_no)};
    } else if (tag == 'S' || tag == 'N') {
      const int this_section = tag == 'S' ? 2 : 3;
      if (this_section < section) throw InputError(line_no, "checkpoint sections out of order");
      section = this_section;
      auto decoded = base64_decode(body);
      if (!decoded) throw InputError(line_no, "invalid base64 payload");
      if (tag == 'S') {
        state.shared.push_back(std::move(*decoded));
      } else {
        if (app != nullptr) {
          try {
            app->validate_node(*decoded);
          } catch (const InputError& e) {
            throw InputError(line_no, std::string("invalid node: ") + e.what());
          }
        }
        state.jobs.push_back({std::move(*decoded), 0});
      }
    } else {
      throw InputError(line_no, std::string("unknown record type '") + tag + "'");
    }
  }
  return state;
}

CheckpointState read_checkpoint_file(const std::filesystem::path& path, const Application* app) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return read_checkpoint(in, app);
}

}  // namespace mts
