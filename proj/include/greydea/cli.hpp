#pragma once

#include <string>
#include <vector>

namespace greydea {

// Command-line surface. `args` excludes the program name. Returns the process
// exit code: 0 success, 2 validation error, 3 numerical (solver/fit) failure.
// Classified errors go to stderr as a JSON object, never as a raw trace.
int run_cli(const std::vector<std::string>& args);

} // namespace greydea
