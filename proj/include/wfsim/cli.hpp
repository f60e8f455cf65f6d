#pragma once

// Command-line front end.  The argv-style entry point is separated from
// main() so tests can drive every subcommand in-process and capture the
// exact bytes written to both streams.
//
// Subcommands: run, correlate, chsh, sample, check.  Exit codes: 0 success,
// 1 internal error or failed check, 2 input error (bad flags, unreadable or
// invalid protocol files).  Reports go to `out`, diagnostics to `err`.

#include <iosfwd>
#include <string>
#include <vector>

namespace wfsim {

// `args` excludes the program name.  Never throws: every failure is mapped
// onto an exit code and a message on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wfsim
