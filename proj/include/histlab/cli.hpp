#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace histlab::cli {

/// Process exit codes. Every command returns exactly one of these.
enum ExitCode : int {
  kSatisfied = 0,
  kNotSatisfied = 1,
  kInputError = 2,
  kTheoremViolation = 3,
};

/// Runs `histlab <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace histlab::cli
