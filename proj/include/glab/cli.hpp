#pragma once

namespace glab::cli {

// Runs one subcommand (map, grunsky, extremality, deform). Returns the exit
// code: 0 success, 1 usage error, 2 numerical failure.
int run(int argc, char** argv);

}  // namespace glab::cli
