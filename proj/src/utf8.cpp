#include "lexalign/utf8.hpp"

#include <algorithm>
#include <cstddef>

namespace lexalign::utf8 {

namespace {

struct NfcDecompEntry {
    char32_t cp;
    std::uint32_t offset;
    std::uint32_t len;
};
struct NfcCccEntry {
    char32_t cp;
    std::uint8_t ccc;
};
struct NfcCompEntry {
    char32_t first;
    char32_t second;
    char32_t composed;
};

#include "../src/nfc_data.inc"

constexpr char32_t kReplacement = 0xFFFD;

// Hangul syllable composition/decomposition is algorithmic (UAX #15).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

int combining_class(char32_t cp) {
    auto it = std::lower_bound(std::begin(kNfcCcc), std::end(kNfcCcc), cp,
                               [](const NfcCccEntry& e, char32_t v) { return e.cp < v; });
    if (it != std::end(kNfcCcc) && it->cp == cp) return it->ccc;
    return 0;
}

void decompose_cp(char32_t cp, std::vector<char32_t>& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        const int s = static_cast<int>(cp - kHangulSBase);
        out.push_back(kHangulLBase + s / kHangulNCount);
        out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
        if (s % kHangulTCount != 0) out.push_back(kHangulTBase + s % kHangulTCount);
        return;
    }
    auto it = std::lower_bound(std::begin(kNfcDecompIndex), std::end(kNfcDecompIndex), cp,
                               [](const NfcDecompEntry& e, char32_t v) { return e.cp < v; });
    if (it != std::end(kNfcDecompIndex) && it->cp == cp) {
        // Table entries are already fully expanded (NFD of the code point).
        for (std::uint32_t i = 0; i < it->len; ++i) out.push_back(kNfcDecompPool[it->offset + i]);
        return;
    }
    out.push_back(cp);
}

char32_t compose_pair(char32_t a, char32_t b) {
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
        b < kHangulVBase + kHangulVCount) {
        const int l = static_cast<int>(a - kHangulLBase);
        const int v = static_cast<int>(b - kHangulVBase);
        return kHangulSBase + (l * kHangulVCount + v) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
        b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    auto it = std::lower_bound(
        std::begin(kNfcCompose), std::end(kNfcCompose), std::pair<char32_t, char32_t>{a, b},
        [](const NfcCompEntry& e, const std::pair<char32_t, char32_t>& v) {
            return e.first != v.first ? e.first < v.first : e.second < v.second;
        });
    if (it != std::end(kNfcCompose) && it->first == a && it->second == b) return it->composed;
    return 0;
}

// Stable sort of nonzero-ccc runs (canonical ordering). Runs are short, so
// insertion sort.
void canonical_order(std::vector<char32_t>& cps) {
    for (std::size_t i = 1; i < cps.size(); ++i) {
        const int cc = combining_class(cps[i]);
        if (cc == 0) continue;
        std::size_t j = i;
        while (j > 0) {
            const int prev = combining_class(cps[j - 1]);
            if (prev == 0 || prev <= cc) break;
            std::swap(cps[j - 1], cps[j]);
            --j;
        }
    }
}

}  // namespace

std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto* b = reinterpret_cast<const unsigned char*>(s.data());
    while (i < s.size()) {
        const unsigned char c = b[i];
        if (c < 0x80) {
            out.push_back(c);
            ++i;
            continue;
        }
        int n;
        char32_t cp;
        if ((c & 0xE0) == 0xC0) {
            n = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            n = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            n = 3;
            cp = c & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = i + static_cast<std::size_t>(n) < s.size();
        if (ok) {
            for (int k = 1; k <= n && ok; ++k) {
                const unsigned char cc = b[i + k];
                if ((cc & 0xC0) != 0x80)
                    ok = false;
                else
                    cp = (cp << 6) | (cc & 0x3F);
            }
        }
        // Reject overlongs, surrogates, and out-of-range values.
        if (ok) {
            static const char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
            if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
        }
        if (ok) {
            out.push_back(cp);
            i += static_cast<std::size_t>(n) + 1;
        } else {
            out.push_back(kReplacement);
            ++i;
        }
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::size_t length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::string nfc(std::string_view s) {
    bool ascii = true;
    for (unsigned char c : s)
        if (c >= 0x80) {
            ascii = false;
            break;
        }
    if (ascii) return std::string(s);

    std::vector<char32_t> cps = decode(s);
    std::vector<char32_t> nfd;
    nfd.reserve(cps.size() + 4);
    for (char32_t cp : cps) decompose_cp(cp, nfd);
    canonical_order(nfd);

    std::vector<char32_t> out;
    out.reserve(nfd.size());
    int last_starter = -1;
    int prev_ccc = -1;  // -1: nothing seen since the starter
    for (char32_t cp : nfd) {
        const int cc = combining_class(cp);
        if (last_starter >= 0) {
            const bool blocked = prev_ccc != -1 && prev_ccc >= cc;
            if (!blocked) {
                const char32_t comp =
                    compose_pair(out[static_cast<std::size_t>(last_starter)], cp);
                if (comp != 0) {
                    out[static_cast<std::size_t>(last_starter)] = comp;
                    continue;
                }
            }
        }
        if (cc == 0) {
            last_starter = static_cast<int>(out.size());
            prev_ccc = -1;
        } else {
            prev_ccc = cc;
        }
        out.push_back(cp);
    }
    return encode(out);
}

}  // namespace lexalign::utf8
