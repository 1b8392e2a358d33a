#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kernelguard {

/// Decodes bytes as UTF-8, replacing every invalid sequence with U+FFFD.
std::string decode_utf8_lossy(std::string_view bytes);

/// Lowercases ASCII, splits on non-alphanumeric characters and keeps tokens
/// of 2..24 code points. Bytes >= 0x80 count as token characters so that
/// non-Latin scripts survive.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower_ascii(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace kernelguard
