#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace llr {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

bool try_parse_double(std::string_view s, double& out);
bool try_parse_long(std::string_view s, long long& out);

/// Writes to a temporary file in the target directory, then renames over
/// `path`, so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

} // namespace llr
