#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qts::cli {

inline constexpr const char* kVersion = "0.1.0";

// Parses command-line arguments (without the program name), runs the
// requested pipeline and writes the JSON report to `out` or to the --output
// file. Diagnostics go to `err`. Returns the process exit code:
//   0  success
//   2  usage or parameter validation failure
//   3  input data could not be read or parsed
//   4  numerical failure while executing the pipeline
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qts::cli
