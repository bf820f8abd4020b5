#pragma once

#include <string>
#include <string_view>

namespace gendec::utf8 {

// Decodes UTF-8 into code points. Invalid sequences raise Error(kSchemaError).
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

// Number of code points; same validation as decode().
std::size_t length(std::string_view text);

inline bool is_hiragana(char32_t cp) { return cp >= 0x3041 && cp <= 0x309F; }

// CJK unified ideographs (basic block + extension A + compatibility) and the
// iteration mark 々, which name kanji use freely.
inline bool is_kanji(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FA1F) || cp == 0x3005;
}

}  // namespace gendec::utf8
