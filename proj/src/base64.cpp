#include "fbx/base64.hpp"

#include <array>

namespace fbx::comm {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int8_t, 256> make_reverse() {
    std::array<int8_t, 256> rev{};
    rev.fill(-1);
    for (int i = 0; i < 64; ++i)
        rev[static_cast<uint8_t>(kAlphabet[i])] = static_cast<int8_t>(i);
    return rev;
}

const std::array<int8_t, 256> kReverse = make_reverse();

}  // namespace

std::string b64_encode(std::span<const uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
        out.push_back(kAlphabet[n & 63]);
    }
    size_t rem = bytes.size() - i;
    if (rem == 1) {
        uint32_t n = bytes[i] << 16;
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rem == 2) {
        uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(kAlphabet[(n >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::vector<uint8_t> b64_decode(std::string_view text) {
    if (text.empty())
        return {};
    if (text.size() % 4 != 0)
        throw Base64Error("base64 length not a multiple of 4");
    size_t pad = 0;
    if (text.back() == '=') {
        pad = 1;
        if (text.size() >= 2 && text[text.size() - 2] == '=')
            pad = 2;
    }
    std::vector<uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (size_t i = 0; i < text.size(); i += 4) {
        bool last = i + 4 == text.size();
        uint32_t n = 0;
        int chars = 4 - static_cast<int>(last ? pad : 0);
        for (int j = 0; j < 4; ++j) {
            char c = text[i + j];
            if (j < chars) {
                int8_t v = kReverse[static_cast<uint8_t>(c)];
                if (v < 0)
                    throw Base64Error("invalid base64 character");
                n = (n << 6) | static_cast<uint32_t>(v);
            } else {
                if (c != '=')
                    throw Base64Error("bad base64 padding");
                n <<= 6;
            }
        }
        out.push_back(static_cast<uint8_t>((n >> 16) & 0xff));
        if (!last || pad < 2)
            out.push_back(static_cast<uint8_t>((n >> 8) & 0xff));
        if (!last || pad < 1)
            out.push_back(static_cast<uint8_t>(n & 0xff));
    }
    // Reject non-canonical padding bits.
    if (pad) {
        size_t i = text.size() - 4;
        uint32_t n = 0;
        for (size_t j = i; j < i + 4 - pad; ++j)
            n = (n << 6) | static_cast<uint32_t>(kReverse[static_cast<uint8_t>(text[j])]);
        int surplus = pad == 2 ? 4 : 2;
        if (n & ((1u << surplus) - 1))
            throw Base64Error("bad base64 padding");
    }
    return out;
}

}  // namespace fbx::comm
