#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssfamon::cli {

// Entry point shared by the executable and the tests. args excludes the program name.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssfamon::cli
