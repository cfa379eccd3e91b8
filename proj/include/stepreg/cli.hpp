#ifndef STEPREG_CLI_HPP
#define STEPREG_CLI_HPP

#include <string>
#include <vector>

namespace stepreg {

// Dispatches a full command line (without argv[0]).
// Exit codes: 0 success, 1 usage error, 2 mathematical infeasibility.
int run_cli(const std::vector<std::string>& args);

}  // namespace stepreg

#endif
