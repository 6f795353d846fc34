#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace prodcat {

// Decodes one UTF-8 codepoint starting at i; advances i. Invalid sequences
// yield U+FFFD and advance one byte.
char32_t utf8_next(const std::string& s, std::size_t& i);

void utf8_append(std::string& out, char32_t cp);

// Byte offsets of codepoint starts, plus s.size() as the final sentinel.
std::vector<std::size_t> utf8_boundaries(const std::string& s);

}  // namespace prodcat
