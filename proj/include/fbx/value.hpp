#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace fbx {

// IEC 61499 elementary data kinds supported by the wire codec.
enum class Kind : uint8_t { Bool, Sint, Int, Dint, String };

const char* kind_name(Kind k);
Kind kind_from_name(std::string_view name);  // "BOOL", "SINT", ...

class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A typed elementary value. The payload width always matches the kind;
// STRING payloads are capped at 65535 bytes so they fit the codec's
// 2-byte length field.
class Value {
public:
    Value() : v_(false) {}

    static Value of_bool(bool b) { return Value(b); }
    static Value of_sint(int8_t n) { return Value(n); }
    static Value of_int(int16_t n) { return Value(n); }
    static Value of_dint(int32_t n) { return Value(n); }
    static Value of_string(std::string s);
    static Value zero(Kind k);

    Kind kind() const { return static_cast<Kind>(v_.index()); }

    bool as_bool() const { return get<bool>(); }
    int8_t as_sint() const { return get<int8_t>(); }
    int16_t as_int() const { return get<int16_t>(); }
    int32_t as_dint() const { return get<int32_t>(); }
    const std::string& as_string() const { return get<std::string>(); }

    std::string to_text() const;  // diagnostic rendering

    bool operator==(const Value& o) const = default;

private:
    template <typename T>
    explicit Value(T v) : v_(std::move(v)) {}

    template <typename T>
    const T& get() const {
        if (!std::holds_alternative<T>(v_))
            throw ValueError("value kind mismatch: have " +
                             std::string(kind_name(kind())));
        return std::get<T>(v_);
    }

    std::variant<bool, int8_t, int16_t, int32_t, std::string> v_;
};

// Parses a pin literal ("1", "true", "-42", raw text for STRING) into
// a value of the requested kind.
Value parse_literal(Kind k, std::string_view text);

}  // namespace fbx
