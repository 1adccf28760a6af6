#pragma once

#include <cstdint>
#include <string>

#include "fbx/runtime.hpp"

namespace fbx::sifb {

// The fixed STATUS vocabulary of the four communication SIFBs.
inline constexpr const char* kStatusOk = "OK";
inline constexpr const char* kStatusInitialized = "INITIALIZED";
inline constexpr const char* kStatusTerminated = "TERMINATED";
inline constexpr const char* kStatusInvalidId = "INVALID_ID";
inline constexpr const char* kStatusConnectFailed = "CONNECT_FAILED";
inline constexpr const char* kStatusTimeout = "TIMEOUT";
inline constexpr const char* kStatusDecodeError = "DECODE_ERROR";
inline constexpr const char* kStatusTlsUnsupported = "TLS_UNSUPPORTED";

// Common surface of the four SIFB behaviors, for stats introspection.
class SifbBehavior : public core::Behavior {
public:
    virtual uint64_t decode_errors() const = 0;
    virtual uint64_t ignored_events() const = 0;  // e.g. RSP without request
};

// Registers PUBLISH / SUBSCRIBE / CLIENT / SERVER with the behavior
// registry. Idempotent.
void register_sifb_behaviors();

// Sum of decode errors across every SIFB instance of the runtime.
uint64_t total_decode_errors(core::ResourceRuntime& rt);

}  // namespace fbx::sifb
