#pragma once

#include <iosfwd>

namespace discretediag::cli
{

enum ExitCode : int
{
    kOk = 0,
    kUsage = 1,
    kData = 2,
    kNumerical = 3,
};

/// Entry point for the `discretediag` command. Errors are reported as one
/// line "error[usage|data|numerical]: message" on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace discretediag::cli
