#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace growgraph::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kConfigError = 2;

/// Entry point of the `growgraph` tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace growgraph::cli
