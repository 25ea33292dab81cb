#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schnapsen {

// Entry point behind the command-line binary. `args` excludes the program
// name (pass {argv + 1, argv + argc}). Results go to `out`, diagnostics to
// `err`; the return value is the process exit status (0 on success). Every
// command is a pure function of its flags, so identical invocations produce
// identical outputs.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace schnapsen
