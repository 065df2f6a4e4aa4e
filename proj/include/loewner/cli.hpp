#pragma once

// Command-line front end. Subcommands map one-to-one onto library
// operations; every report echoes the effective run configuration so runs
// are reproducible from their output alone.
//
// Exit codes: 0 accept / success, 1 reject / violation found, 2 usage or
// input error.

#include <iosfwd>
#include <string>
#include <vector>

namespace loewner::cli {

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace loewner::cli
