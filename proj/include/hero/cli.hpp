#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hero::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kIo = 2, kNumeric = 3 };

// args excludes the program name. stdout carries results, stderr diagnostics.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hero::cli
