#pragma once
#include <ostream>
#include <string>
#include <vector>

namespace fracgreen {

// Entry point of the command-line tool; args excludes the program name.
// Returns 0 when every requested check passes, 1 on a computation failure
// or failed check (a JSON error record goes to `err`), 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracgreen
