#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgesign::cli {

/// Runs one command line (args excludes the program name). Results go to
/// `out` unless an output path is given; errors go to `err` as one JSON
/// object. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgesign::cli
