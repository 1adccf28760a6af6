#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fbx::comm {

class IdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One segment of an ID string: `name[p1:p2:...]`. Bracket contents are
// preserved verbatim.
struct LayerSpec {
    std::string name;
    std::vector<std::string> params;

    bool operator==(const LayerSpec&) const = default;
};

// A parsed layer chain, outermost encoding first, transport last.
struct CommID {
    std::vector<LayerSpec> layers;

    const LayerSpec& transport() const { return layers.back(); }
    std::string to_string() const;

    bool operator==(const CommID&) const = default;
};

bool is_transport_layer(const std::string& name);  // "ip" or "xmpp"

// Parses `layer[p1:p2:...].layer[...]`. Splits on `.` and `:` only at
// bracket depth zero so JIDs and dotted hosts survive inside params.
CommID parse_comm_id(std::string_view id);

}  // namespace fbx::comm
