#include "fbx/comm_id.hpp"

namespace fbx::comm {

bool is_transport_layer(const std::string& name) {
    return name == "ip" || name == "xmpp";
}

std::string CommID::to_string() const {
    std::string out;
    for (size_t i = 0; i < layers.size(); ++i) {
        if (i)
            out += '.';
        out += layers[i].name;
        out += '[';
        for (size_t j = 0; j < layers[i].params.size(); ++j) {
            if (j)
                out += ':';
            out += layers[i].params[j];
        }
        out += ']';
    }
    return out;
}

namespace {

std::vector<std::string> split_depth0(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '[') ++depth;
        else if (c == ']') {
            --depth;
            if (depth < 0)
                throw IdError("unbalanced brackets in ID string");
        }
        if (c == sep && depth == 0) {
            parts.emplace_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (depth != 0)
        throw IdError("unbalanced brackets in ID string");
    parts.emplace_back(std::move(cur));
    return parts;
}

LayerSpec parse_segment(const std::string& seg) {
    if (seg.empty())
        throw IdError("empty segment in ID string");
    size_t open = seg.find('[');
    if (open == std::string::npos || seg.back() != ']')
        throw IdError("layer segment missing brackets: " + seg);
    LayerSpec layer;
    layer.name = seg.substr(0, open);
    if (layer.name.empty())
        throw IdError("layer segment missing name: " + seg);
    std::string inner = seg.substr(open + 1, seg.size() - open - 2);
    if (!inner.empty())
        layer.params = split_depth0(inner, ':');
    return layer;
}

}  // namespace

CommID parse_comm_id(std::string_view id) {
    CommID out;
    for (const std::string& seg : split_depth0(id, '.'))
        out.layers.push_back(parse_segment(seg));
    for (size_t i = 0; i < out.layers.size(); ++i) {
        const std::string& name = out.layers[i].name;
        bool last = i + 1 == out.layers.size();
        if (is_transport_layer(name)) {
            if (!last)
                throw IdError("transport layer '" + name + "' must be last");
        } else if (name == "fbdk") {
            if (last)
                throw IdError("missing transport layer after '" + name + "'");
        } else {
            throw IdError("unknown layer name: " + name);
        }
    }
    return out;
}

}  // namespace fbx::comm
