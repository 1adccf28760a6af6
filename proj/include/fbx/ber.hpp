#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbx/value.hpp"

namespace fbx::comm {

using WireFrame = std::vector<uint8_t>;

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fixed application-class tag assignments:
//   0x40 BOOL false          (value carried in the tag octet)
//   0x41 BOOL true
//   0x42 SINT  + 1 octet
//   0x43 INT   + 2 octets big-endian two's-complement
//   0x44 DINT  + 4 octets big-endian two's-complement
//   0x50 STRING + 2-octet big-endian length + UTF-8 bytes
// Frames are the concatenation of per-value encodings and are
// self-delimiting.
WireFrame ber_encode(const std::vector<Value>& values);

// Inverse of ber_encode. Consumes the frame exactly; trailing bytes
// after the last complete value are an error.
std::vector<Value> ber_decode(std::span<const uint8_t> frame);

}  // namespace fbx::comm
