#pragma once

#include <ostream>

namespace picplace {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitLegalization = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace picplace
