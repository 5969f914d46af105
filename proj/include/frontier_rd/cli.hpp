#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace frontier_rd::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one `frontier-rd` invocation. `args` excludes the program name.
/// Returns the process exit code: 0 success, 1 runtime or numerical
/// failure, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace frontier_rd::cli
