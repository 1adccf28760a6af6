#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbx::comm {

class Base64Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Standard alphabet with '=' padding. Decoding is strict: non-alphabet
// characters, bad lengths and bad padding are rejected.
std::string b64_encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> b64_decode(std::string_view text);

}  // namespace fbx::comm
