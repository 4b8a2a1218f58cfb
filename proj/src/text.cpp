#include "mka/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

#include <stdexcept>

namespace mka::text {

std::vector<char32_t> utf8_decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    while (i < s.size()) {
        const unsigned char b0 = byte(i);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() && (byte(i + 1) & 0xC0) == 0x80) {
            cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
            len = 2;
            if (cp < 0x80) cp = 0xFFFD;  // overlong
        } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() && (byte(i + 1) & 0xC0) == 0x80 &&
                   (byte(i + 2) & 0xC0) == 0x80) {
            cp = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
            len = 3;
            if (cp < 0x800 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
        } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() && (byte(i + 1) & 0xC0) == 0x80 &&
                   (byte(i + 2) & 0xC0) == 0x80 && (byte(i + 3) & 0xC0) == 0x80) {
            cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) | ((byte(i + 2) & 0x3Fu) << 6) |
                 (byte(i + 3) & 0x3Fu);
            len = 4;
            if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(const char32_t* data, std::size_t count) {
    std::string out;
    out.reserve(count * 2);
    for (std::size_t i = 0; i < count; ++i) {
        char32_t cp = data[i];
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
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
    return out;
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
    return utf8_encode(cps.data(), cps.size());
}

bool is_space(char32_t c) {
    if (c <= 0x7F) return c == ' ' || (c >= 0x09 && c <= 0x0D);
    return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

namespace {

// UTF-8 -> NFC-composed UTF-16, via ICU. Invalid input bytes are substituted.
std::vector<UChar> nfc_utf16(std::string_view s) {
    UErrorCode ec = U_ZERO_ERROR;
    std::vector<UChar> u16(s.size() + 1);
    int32_t u16_len = 0;
    u_strFromUTF8WithSub(u16.data(), static_cast<int32_t>(u16.size()), &u16_len, s.data(),
                         static_cast<int32_t>(s.size()), 0xFFFD, nullptr, &ec);
    if (U_FAILURE(ec)) throw std::runtime_error("utf-8 to utf-16 conversion failed");
    u16.resize(static_cast<std::size_t>(u16_len));

    const UNormalizer2* nfc = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw std::runtime_error("ICU NFC normalizer unavailable");

    std::vector<UChar> composed(u16.size() + 16);
    for (;;) {
        ec = U_ZERO_ERROR;
        const int32_t n = unorm2_normalize(nfc, u16.data(), static_cast<int32_t>(u16.size()),
                                           composed.data(), static_cast<int32_t>(composed.size()), &ec);
        if (ec == U_BUFFER_OVERFLOW_ERROR) {
            composed.resize(static_cast<std::size_t>(n) + 1);
            continue;
        }
        if (U_FAILURE(ec)) throw std::runtime_error("NFC normalization failed");
        composed.resize(static_cast<std::size_t>(n));
        return composed;
    }
}

}  // namespace

std::vector<char32_t> normalize(std::string_view s) {
    const std::vector<UChar> composed = nfc_utf16(s);

    std::vector<char32_t> cps;
    cps.reserve(composed.size());
    int32_t i = 0;
    const int32_t len = static_cast<int32_t>(composed.size());
    while (i < len) {
        UChar32 c;
        U16_NEXT(composed.data(), i, len, c);
        cps.push_back(static_cast<char32_t>(u_tolower(c)));
    }

    std::size_t begin = 0, end = cps.size();
    while (begin < end && is_space(cps[begin])) ++begin;
    while (end > begin && is_space(cps[end - 1])) --end;
    return {cps.begin() + static_cast<std::ptrdiff_t>(begin), cps.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::string normalize_utf8(std::string_view s) {
    return utf8_encode(normalize(s));
}

std::string_view trim(std::string_view s) {
    const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(s[b])) ++b;
    while (e > b && is_ws(s[e - 1])) --e;
    return s.substr(b, e - b);
}

}  // namespace mka::text
