#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexalign::utf8 {

// Lenient decoder: invalid byte sequences become U+FFFD, one replacement per
// rejected byte, so decoding never fails on crawled vocabulary data.
std::vector<char32_t> decode(std::string_view s);

std::string encode(const std::vector<char32_t>& cps);

void append(std::string& out, char32_t cp);

// Number of Unicode scalar values in s (replacement chars counted like any
// other code point).
std::size_t length(std::string_view s);

// Canonical composition (NFC). Pure ASCII input is returned unchanged.
std::string nfc(std::string_view s);

}  // namespace lexalign::utf8
