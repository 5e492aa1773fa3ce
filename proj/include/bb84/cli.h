#ifndef BB84_CLI_H_
#define BB84_CLI_H_

#include <ostream>

namespace bb84 {

// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitFlagError = 2;

// Entry point of the bb84rate tool. Subcommands: rate, optimize, sweep,
// validate, simulate, estimate.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace bb84

#endif  // BB84_CLI_H_
