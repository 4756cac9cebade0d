#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qd::text {

/// Splits text into lines, each keeping its '\n' terminator. The final line
/// has no terminator when the text does not end with a newline. Joining the
/// result reproduces the input byte-exactly.
std::vector<std::string> split_lines(std::string_view text);

std::string join(const std::vector<std::string>& lines);

/// Line content without its "\n" (and without a preceding "\r").
std::string_view strip_eol(std::string_view line);

std::string_view trim(std::string_view s);

bool is_valid_utf8(std::string_view s);

/// True when the bytes look like a binary blob (contain a NUL byte).
bool looks_binary(std::string_view s);

bool ends_with(std::string_view s, std::string_view suffix);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace qd::text
