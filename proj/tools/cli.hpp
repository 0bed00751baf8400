#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace labcli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kSchemaVersion = 1;

/// Runs one command. Reports go to --out or `out`; diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

/// Git blob hash ("blob <len>\0<content>", SHA-1, hex).
std::string git_blob_hash(const std::string& content);

}  // namespace labcli
