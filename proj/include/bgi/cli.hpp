#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bgi {

// Command-line entry point. `args` excludes the program name. Results go to
// `out` (or the --output file); failures print one JSON object
// {"error": kind, "message": text} to `err`.
//
// Exit codes: 0 success, 1 file I/O failure, 2 usage error, 3 invalid input
// or algorithm failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bgi
