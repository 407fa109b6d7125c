#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptk {

std::string read_file(const std::string& path);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_on(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// "key = value" lines; blank lines and lines starting with '#' are skipped.
/// Throws std::invalid_argument naming the line on anything else.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

bool parse_bool(std::string_view value);

}  // namespace ptk
