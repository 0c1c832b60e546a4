#pragma once

#include <string>
#include <vector>

namespace nhqm {

// Entry point of the `nhqm` tool. Returns 0 on success, 2 for bad input and 3
// for numerical failures, after printing a one-line diagnostic to stderr.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace nhqm
