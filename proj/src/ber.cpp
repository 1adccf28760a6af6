#include "fbx/ber.hpp"

namespace fbx::comm {

namespace {

constexpr uint8_t kTagBoolFalse = 0x40;
constexpr uint8_t kTagBoolTrue = 0x41;
constexpr uint8_t kTagSint = 0x42;
constexpr uint8_t kTagInt = 0x43;
constexpr uint8_t kTagDint = 0x44;
constexpr uint8_t kTagString = 0x50;

void put_be(WireFrame& out, uint64_t v, int octets) {
    for (int i = octets - 1; i >= 0; --i)
        out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

}  // namespace

WireFrame ber_encode(const std::vector<Value>& values) {
    WireFrame out;
    for (const Value& v : values) {
        switch (v.kind()) {
        case Kind::Bool:
            out.push_back(v.as_bool() ? kTagBoolTrue : kTagBoolFalse);
            break;
        case Kind::Sint:
            out.push_back(kTagSint);
            put_be(out, static_cast<uint8_t>(v.as_sint()), 1);
            break;
        case Kind::Int:
            out.push_back(kTagInt);
            put_be(out, static_cast<uint16_t>(v.as_int()), 2);
            break;
        case Kind::Dint:
            out.push_back(kTagDint);
            put_be(out, static_cast<uint32_t>(v.as_dint()), 4);
            break;
        case Kind::String: {
            const std::string& s = v.as_string();
            if (s.size() > 65535)
                throw CodecError("STRING too long for 2-byte length field");
            out.push_back(kTagString);
            put_be(out, s.size(), 2);
            out.insert(out.end(), s.begin(), s.end());
            break;
        }
        }
    }
    return out;
}

std::vector<Value> ber_decode(std::span<const uint8_t> frame) {
    std::vector<Value> values;
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (frame.size() - pos < n)
            throw CodecError("truncated frame");
    };
    auto take_be = [&](int octets) {
        uint64_t v = 0;
        for (int i = 0; i < octets; ++i)
            v = (v << 8) | frame[pos++];
        return v;
    };
    while (pos < frame.size()) {
        uint8_t tag = frame[pos++];
        switch (tag) {
        case kTagBoolFalse:
            values.push_back(Value::of_bool(false));
            break;
        case kTagBoolTrue:
            values.push_back(Value::of_bool(true));
            break;
        case kTagSint:
            need(1);
            values.push_back(Value::of_sint(static_cast<int8_t>(take_be(1))));
            break;
        case kTagInt:
            need(2);
            values.push_back(Value::of_int(static_cast<int16_t>(take_be(2))));
            break;
        case kTagDint:
            need(4);
            values.push_back(Value::of_dint(static_cast<int32_t>(take_be(4))));
            break;
        case kTagString: {
            need(2);
            size_t len = take_be(2);
            need(len);
            values.push_back(Value::of_string(
                std::string(frame.begin() + pos, frame.begin() + pos + len)));
            pos += len;
            break;
        }
        default:
            throw CodecError("unknown tag octet");
        }
    }
    return values;
}

}  // namespace fbx::comm
