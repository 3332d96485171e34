#ifndef LATE_CLI_HPP
#define LATE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace late::cli {

/// Command-line front end. Exit codes: 0 success (recognize: true),
/// 1 recognize: false / verify: failures, 2 usage or input error,
/// 3 engine rejection (e.g. epsilon grammar handed to earley).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace late::cli

#endif  // LATE_CLI_HPP
