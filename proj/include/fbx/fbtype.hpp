#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbx/value.hpp"

namespace fbx::core {

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PinDecl {
    std::string name;
    Kind kind = Kind::Bool;
};

// An FB type: ordered event pins and typed data pins plus the name of a
// built-in behavior. Pin names are unique within their class (event
// inputs, event outputs, data inputs, data outputs); the RS block reuses
// S/R across the event and data classes the way the standard block does.
struct FBTypeDecl {
    std::string name;
    std::vector<std::string> event_inputs;
    std::vector<std::string> event_outputs;
    std::vector<PinDecl> data_inputs;
    std::vector<PinDecl> data_outputs;
    std::string behavior;  // registry key, e.g. "RS", "PUBLISH"

    bool has_event_input(const std::string& pin) const;
    bool has_event_output(const std::string& pin) const;
    const PinDecl* data_input(const std::string& pin) const;
    const PinDecl* data_output(const std::string& pin) const;
};

// Resolves a type name to its declaration. Fixed names cover the logic
// blocks (RS, OR2, AND2, NOT, E_CYCLE, IX, QX); SIFB shapes are
// synthesized from parametric names:
//   PUBLISH_n    — n BOOL SD pins
//   SUBSCRIBE_n  — n BOOL RD pins
//   CLIENT_n     — data-less request, n BOOL RD pins (poll pattern)
//   CLIENT_n_m   — n BOOL SD pins, m BOOL RD pins
//   SERVER_n     — n BOOL SD pins, no RD (poll responder)
//   SERVER_n_m   — n BOOL SD pins, m BOOL RD pins
std::optional<FBTypeDecl> lookup_type(const std::string& name);

// Synthesized SIFB declarations with explicit pin kinds, for callers that
// need non-BOOL payload pins.
FBTypeDecl make_publish_type(const std::vector<Kind>& sd);
FBTypeDecl make_subscribe_type(const std::vector<Kind>& rd);
FBTypeDecl make_client_type(const std::vector<Kind>& sd, const std::vector<Kind>& rd);
FBTypeDecl make_server_type(const std::vector<Kind>& sd, const std::vector<Kind>& rd);

bool is_sifb(const FBTypeDecl& type);

struct DeviceDecl {
    std::string name;
    std::string host;
};

struct FBDecl {
    std::string name;
    FBTypeDecl type;
    std::string device;
    // pin-name → literal (data-input initial value), plus "ID" for SIFBs.
    std::map<std::string, std::string> params;
};

struct ConnDecl {
    std::string from_fb;
    std::string from_pin;
    std::string to_fb;
    std::string to_pin;
};

struct NetworkDecl {
    std::vector<DeviceDecl> devices;
    std::vector<FBDecl> fbs;
    std::vector<ConnDecl> events;
    std::vector<ConnDecl> data;

    const FBDecl* find_fb(const std::string& name) const;
    const DeviceDecl* find_device(const std::string& name) const;

    // Checks every FBNetwork invariant: endpoints exist with the right
    // direction, data-input fan-in ≤ 1, kinds match across data
    // connections, and no connection crosses devices. Throws
    // NetworkError naming the offending element.
    void validate() const;
};

}  // namespace fbx::core
