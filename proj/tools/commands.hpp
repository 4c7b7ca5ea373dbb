#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sid::cli {

/// Runs the `sid` command line with the given arguments (argv[0] excluded).
/// Returns 0 on success, 2 on usage errors and 1 on data errors; error
/// messages go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace sid::cli
