#pragma once

#include <ostream>

namespace radsum::cli {

/// Entry point of the radsum binary. Exit codes: 0 success, 1 usage,
/// 2 data validation, 3 internal.
int run(int argc, const char* const* argv, std::ostream& log);

}  // namespace radsum::cli
