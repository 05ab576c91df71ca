#include "desm/tokenize.hpp"

#include <cstdint>

namespace desm {
namespace {

bool is_unicode_whitespace(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85:    // next line
        case 0xA0:    // no-break space
        case 0x1680:  // ogham space mark
        case 0x2028:  // line separator
        case 0x2029:  // paragraph separator
        case 0x202F:  // narrow no-break space
        case 0x205F:  // medium mathematical space
        case 0x3000:  // ideographic space
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;  // en quad .. hair space
    }
}

bool is_ascii_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return (u >= 0x21 && u <= 0x2F) || (u >= 0x3A && u <= 0x40) ||
           (u >= 0x5B && u <= 0x60) || (u >= 0x7B && u <= 0x7E);
}

// Decodes one UTF-8 code point at `i`, advancing `i` past it. Bytes that do
// not form a valid sequence are consumed one at a time and returned as-is.
std::uint32_t next_code_point(std::string_view s, std::size_t& i, std::size_t& len) {
    auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t n = 1;
    std::uint32_t cp = b0;
    if (b0 >= 0xF0) { n = 4; cp = b0 & 0x07u; }
    else if (b0 >= 0xE0) { n = 3; cp = b0 & 0x0Fu; }
    else if (b0 >= 0xC0) { n = 2; cp = b0 & 0x1Fu; }
    if (n > 1) {
        if (i + n > s.size()) { len = 1; ++i; return b0; }
        for (std::size_t k = 1; k < n; ++k) {
            auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0u) != 0x80u) { len = 1; ++i; return b0; }
            cp = (cp << 6) | (bk & 0x3Fu);
        }
    }
    len = n;
    i += n;
    return cp;
}

void strip_and_emit(std::string& tok, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = tok.size();
    while (begin < end && is_ascii_punct(tok[begin])) ++begin;
    while (end > begin && is_ascii_punct(tok[end - 1])) --end;
    if (end > begin) out.emplace_back(tok.substr(begin, end - begin));
    tok.clear();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        std::size_t len = 0;
        std::uint32_t cp = next_code_point(text, i, len);
        if (is_unicode_whitespace(cp)) {
            if (!current.empty()) strip_and_emit(current, out);
            continue;
        }
        if (len == 1) {
            char c = text[start];
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            current.push_back(c);
        } else {
            current.append(text.substr(start, len));
        }
    }
    if (!current.empty()) strip_and_emit(current, out);
    return out;
}

}  // namespace desm
