#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcgan::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one rcgan-lab invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime or verification failure (a JSON error
/// object is written to `err`), 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace rcgan::cli
