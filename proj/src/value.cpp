#include "fbx/value.hpp"

#include <charconv>

namespace fbx {

const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Bool: return "BOOL";
    case Kind::Sint: return "SINT";
    case Kind::Int: return "INT";
    case Kind::Dint: return "DINT";
    case Kind::String: return "STRING";
    }
    return "?";
}

Kind kind_from_name(std::string_view name) {
    if (name == "BOOL") return Kind::Bool;
    if (name == "SINT") return Kind::Sint;
    if (name == "INT") return Kind::Int;
    if (name == "DINT") return Kind::Dint;
    if (name == "STRING") return Kind::String;
    throw ValueError("unknown data kind: " + std::string(name));
}

Value Value::of_string(std::string s) {
    if (s.size() > 65535)
        throw ValueError("STRING payload exceeds 65535 bytes");
    return Value(std::move(s));
}

Value Value::zero(Kind k) {
    switch (k) {
    case Kind::Bool: return of_bool(false);
    case Kind::Sint: return of_sint(0);
    case Kind::Int: return of_int(0);
    case Kind::Dint: return of_dint(0);
    case Kind::String: return of_string("");
    }
    throw ValueError("bad kind");
}

std::string Value::to_text() const {
    switch (kind()) {
    case Kind::Bool: return as_bool() ? "1" : "0";
    case Kind::Sint: return std::to_string(as_sint());
    case Kind::Int: return std::to_string(as_int());
    case Kind::Dint: return std::to_string(as_dint());
    case Kind::String: return as_string();
    }
    return "";
}

namespace {

int64_t parse_number(std::string_view text, int64_t lo, int64_t hi) {
    int64_t n = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || p != text.data() + text.size() || n < lo || n > hi)
        throw ValueError("bad numeric literal: " + std::string(text));
    return n;
}

}  // namespace

Value parse_literal(Kind k, std::string_view text) {
    switch (k) {
    case Kind::Bool:
        if (text == "1" || text == "true" || text == "TRUE") return Value::of_bool(true);
        if (text == "0" || text == "false" || text == "FALSE") return Value::of_bool(false);
        throw ValueError("bad BOOL literal: " + std::string(text));
    case Kind::Sint:
        return Value::of_sint(static_cast<int8_t>(parse_number(text, -128, 127)));
    case Kind::Int:
        return Value::of_int(static_cast<int16_t>(parse_number(text, -32768, 32767)));
    case Kind::Dint:
        return Value::of_dint(static_cast<int32_t>(parse_number(text, INT32_MIN, INT32_MAX)));
    case Kind::String:
        return Value::of_string(std::string(text));
    }
    throw ValueError("bad kind");
}

}  // namespace fbx
