#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ecs::text {

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);

// Decodes UTF-8 into Unicode scalar values; malformed bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s);

// Label normalization used wherever series labels are compared: Unicode
// case fold, trim, collapse internal whitespace runs to one ASCII space.
std::string normalize_label(std::string_view label);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace ecs::text
