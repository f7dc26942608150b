#pragma once

#include <string>

#include "bergman/quad.hpp"

namespace bergman {

// Exit codes: 0 success / verification passed, 1 verification failed,
// 2 input or configuration error, 3 numerical failure.
struct RunConfig {
  std::string command;  // newton|bergman|zeta|fiber|verify|localize|sandwich
  std::string input;    // model text, or a path to a file holding it
  std::string target = "bergman";  // verify target
  QuadConfig quad;
  double threshold = -1;  // fit threshold; <0 picks the per-law default
  std::string out;        // output path prefix; empty = stdout only
  long long seed = 0;
  int M = 0;  // sandwich axis power (0 = search)
  double s_min = 0, s_max = 0;
  int s_points = 0;  // 0 = default pole-ladder grid
  bool list_fixtures = false;
};

int run(const RunConfig& cfg);
int run_cli(int argc, const char* const* argv);

}  // namespace bergman
