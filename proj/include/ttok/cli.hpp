#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ttok::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kInternalError = 3,
};

/// Entry point of the `ttok` tool. Tables go to `out`; errors are a single
/// `ttok: error[<kind>]: <message>` line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace ttok::cli
