#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "mts/cli.hpp"

namespace {

mts::RunControl control;

extern "C" void on_signal(int sig) {
  if (sig == SIGUSR1)
    control.checkpoint_requested = true;
  else
    control.stop_requested = true;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
#ifdef SIGUSR1
  std::signal(SIGUSR1, on_signal);
#endif
  const std::vector<std::string> args(argv + 1, argv + argc);
  return mts::cli_main(args, std::cin, std::cout, std::cerr, &control);
}
