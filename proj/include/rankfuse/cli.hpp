#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rankfuse {

inline constexpr const char *kVersion = "1.0.0";

// Entry point behind the `rankfuse` binary. args excludes the program name.
// Returns the process exit status; diagnostics go to `err`, and results that
// are not written to an --out file go to `out`.
int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string &path, const std::string &content);

} // namespace rankfuse
