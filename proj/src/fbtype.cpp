#include "fbx/fbtype.hpp"

#include <algorithm>
#include <charconv>

namespace fbx::core {

bool FBTypeDecl::has_event_input(const std::string& pin) const {
    return std::find(event_inputs.begin(), event_inputs.end(), pin) !=
           event_inputs.end();
}

bool FBTypeDecl::has_event_output(const std::string& pin) const {
    return std::find(event_outputs.begin(), event_outputs.end(), pin) !=
           event_outputs.end();
}

const PinDecl* FBTypeDecl::data_input(const std::string& pin) const {
    for (const PinDecl& p : data_inputs)
        if (p.name == pin)
            return &p;
    return nullptr;
}

const PinDecl* FBTypeDecl::data_output(const std::string& pin) const {
    for (const PinDecl& p : data_outputs)
        if (p.name == pin)
            return &p;
    return nullptr;
}

namespace {

std::vector<PinDecl> numbered(const std::string& prefix, const std::vector<Kind>& kinds) {
    std::vector<PinDecl> pins;
    for (size_t i = 0; i < kinds.size(); ++i)
        pins.push_back({prefix + "_" + std::to_string(i + 1), kinds[i]});
    return pins;
}

FBTypeDecl sifb_base(std::string name, std::string behavior) {
    FBTypeDecl t;
    t.name = std::move(name);
    t.behavior = std::move(behavior);
    t.event_inputs = {"INIT"};
    t.event_outputs = {"INITO"};
    t.data_inputs = {{"QI", Kind::Bool}, {"ID", Kind::String}};
    t.data_outputs = {{"QO", Kind::Bool}, {"STATUS", Kind::String}};
    return t;
}

// Parses "_n" or "_n_m" suffixes of parametric SIFB type names.
std::optional<std::vector<size_t>> parse_arities(const std::string& suffix) {
    std::vector<size_t> out;
    size_t pos = 0;
    while (pos < suffix.size()) {
        if (suffix[pos] != '_')
            return std::nullopt;
        ++pos;
        size_t value = 0;
        auto [end, ec] = std::from_chars(suffix.data() + pos,
                                         suffix.data() + suffix.size(), value);
        if (ec != std::errc() || end == suffix.data() + pos)
            return std::nullopt;
        out.push_back(value);
        pos = static_cast<size_t>(end - suffix.data());
    }
    return out.empty() || out.size() > 2 ? std::nullopt
                                         : std::optional<std::vector<size_t>>(out);
}

}  // namespace

FBTypeDecl make_publish_type(const std::vector<Kind>& sd) {
    FBTypeDecl t = sifb_base("PUBLISH_" + std::to_string(sd.size()), "PUBLISH");
    t.event_inputs.push_back("REQ");
    t.event_outputs.push_back("CNF");
    for (PinDecl& p : numbered("SD", sd))
        t.data_inputs.push_back(p);
    return t;
}

FBTypeDecl make_subscribe_type(const std::vector<Kind>& rd) {
    FBTypeDecl t = sifb_base("SUBSCRIBE_" + std::to_string(rd.size()), "SUBSCRIBE");
    t.event_inputs.push_back("RX");  // posted by the endpoint, never wired
    t.event_outputs.push_back("IND");
    for (PinDecl& p : numbered("RD", rd))
        t.data_outputs.push_back(p);
    return t;
}

FBTypeDecl make_client_type(const std::vector<Kind>& sd, const std::vector<Kind>& rd) {
    FBTypeDecl t = sifb_base(
        "CLIENT_" + std::to_string(sd.size()) + "_" + std::to_string(rd.size()),
        "CLIENT");
    t.event_inputs.push_back("REQ");
    t.event_inputs.push_back("RX");
    t.event_outputs.push_back("CNF");
    for (PinDecl& p : numbered("SD", sd))
        t.data_inputs.push_back(p);
    for (PinDecl& p : numbered("RD", rd))
        t.data_outputs.push_back(p);
    return t;
}

FBTypeDecl make_server_type(const std::vector<Kind>& sd, const std::vector<Kind>& rd) {
    FBTypeDecl t = sifb_base(
        "SERVER_" + std::to_string(sd.size()) + "_" + std::to_string(rd.size()),
        "SERVER");
    t.event_inputs.push_back("RSP");
    t.event_inputs.push_back("RX");
    t.event_outputs.push_back("IND");
    for (PinDecl& p : numbered("SD", sd))
        t.data_inputs.push_back(p);
    for (PinDecl& p : numbered("RD", rd))
        t.data_outputs.push_back(p);
    return t;
}

bool is_sifb(const FBTypeDecl& type) {
    return type.behavior == "PUBLISH" || type.behavior == "SUBSCRIBE" ||
           type.behavior == "CLIENT" || type.behavior == "SERVER";
}

std::optional<FBTypeDecl> lookup_type(const std::string& name) {
    if (name == "RS") {
        FBTypeDecl t;
        t.name = "RS";
        t.behavior = "RS";
        t.event_inputs = {"S", "R"};
        t.event_outputs = {"EO"};
        t.data_inputs = {{"S", Kind::Bool}, {"R", Kind::Bool}};
        t.data_outputs = {{"Q", Kind::Bool}};
        return t;
    }
    if (name == "OR2" || name == "AND2") {
        FBTypeDecl t;
        t.name = name;
        t.behavior = name;
        t.event_inputs = {"REQ"};
        t.event_outputs = {"CNF"};
        t.data_inputs = {{"IN1", Kind::Bool}, {"IN2", Kind::Bool}};
        t.data_outputs = {{"OUT", Kind::Bool}};
        return t;
    }
    if (name == "NOT") {
        FBTypeDecl t;
        t.name = "NOT";
        t.behavior = "NOT";
        t.event_inputs = {"REQ"};
        t.event_outputs = {"CNF"};
        t.data_inputs = {{"IN", Kind::Bool}};
        t.data_outputs = {{"OUT", Kind::Bool}};
        return t;
    }
    if (name == "E_CYCLE") {
        FBTypeDecl t;
        t.name = "E_CYCLE";
        t.behavior = "E_CYCLE";
        t.event_inputs = {"START", "STOP", "TICK"};  // TICK posted by the timer
        t.event_outputs = {"EO"};
        t.data_inputs = {{"DT", Kind::Dint}};
        return t;
    }
    if (name == "IX") {
        FBTypeDecl t;
        t.name = "IX";
        t.behavior = "IX";
        t.event_inputs = {"REQ"};
        t.event_outputs = {"IND"};
        t.data_outputs = {{"Q", Kind::Bool}};
        return t;
    }
    if (name == "QX") {
        FBTypeDecl t;
        t.name = "QX";
        t.behavior = "QX";
        t.event_inputs = {"REQ"};
        t.event_outputs = {"CNF"};
        t.data_inputs = {{"IN", Kind::Bool}};
        return t;
    }

    for (const char* prefix : {"PUBLISH", "SUBSCRIBE", "CLIENT", "SERVER"}) {
        std::string p(prefix);
        if (name.rfind(p, 0) != 0 || name.size() <= p.size())
            continue;
        auto arities = parse_arities(name.substr(p.size()));
        if (!arities)
            return std::nullopt;
        auto bools = [](size_t n) { return std::vector<Kind>(n, Kind::Bool); };
        FBTypeDecl t;
        if (p == "PUBLISH" && arities->size() == 1)
            t = make_publish_type(bools((*arities)[0]));
        else if (p == "SUBSCRIBE" && arities->size() == 1)
            t = make_subscribe_type(bools((*arities)[0]));
        else if (p == "CLIENT")
            t = arities->size() == 1
                    ? make_client_type({}, bools((*arities)[0]))
                    : make_client_type(bools((*arities)[0]), bools((*arities)[1]));
        else if (p == "SERVER")
            t = arities->size() == 1
                    ? make_server_type(bools((*arities)[0]), {})
                    : make_server_type(bools((*arities)[0]), bools((*arities)[1]));
        else
            return std::nullopt;
        t.name = name;  // keep the exact spelling the caller used
        return t;
    }
    return std::nullopt;
}

const FBDecl* NetworkDecl::find_fb(const std::string& name) const {
    for (const FBDecl& fb : fbs)
        if (fb.name == name)
            return &fb;
    return nullptr;
}

const DeviceDecl* NetworkDecl::find_device(const std::string& name) const {
    for (const DeviceDecl& d : devices)
        if (d.name == name)
            return &d;
    return nullptr;
}

void NetworkDecl::validate() const {
    for (const FBDecl& fb : fbs) {
        if (!find_device(fb.device))
            throw NetworkError("fb " + fb.name + " mapped to unknown device " +
                               fb.device);
        if (is_sifb(fb.type) && !fb.params.count("ID"))
            throw NetworkError("sifb " + fb.name + " has no ID parameter");
        for (const auto& [pin, literal] : fb.params) {
            if (pin == "ID" && is_sifb(fb.type))
                continue;
            const PinDecl* decl = fb.type.data_input(pin);
            if (!decl)
                throw NetworkError("fb " + fb.name + " has no data input " + pin);
            try {
                parse_literal(decl->kind, literal);
            } catch (const ValueError& e) {
                throw NetworkError("fb " + fb.name + " pin " + pin + ": " +
                                   e.what());
            }
        }
    }

    auto endpoint = [&](const ConnDecl& c, bool from) -> const FBDecl& {
        const std::string& name = from ? c.from_fb : c.to_fb;
        const FBDecl* fb = find_fb(name);
        if (!fb)
            throw NetworkError("connection references unknown fb " + name);
        return *fb;
    };

    for (const ConnDecl& c : events) {
        const FBDecl& src = endpoint(c, true);
        const FBDecl& dst = endpoint(c, false);
        if (!src.type.has_event_output(c.from_pin))
            throw NetworkError("fb " + c.from_fb + " has no event output " +
                               c.from_pin);
        if (!dst.type.has_event_input(c.to_pin))
            throw NetworkError("fb " + c.to_fb + " has no event input " + c.to_pin);
        if (src.device != dst.device)
            throw NetworkError("event connection " + c.from_fb + "." + c.from_pin +
                               " -> " + c.to_fb + "." + c.to_pin +
                               " crosses devices");
    }

    std::vector<std::string> seen_sinks;
    for (const ConnDecl& c : data) {
        const FBDecl& src = endpoint(c, true);
        const FBDecl& dst = endpoint(c, false);
        const PinDecl* out = src.type.data_output(c.from_pin);
        if (!out)
            throw NetworkError("fb " + c.from_fb + " has no data output " +
                               c.from_pin);
        const PinDecl* in = dst.type.data_input(c.to_pin);
        if (!in)
            throw NetworkError("fb " + c.to_fb + " has no data input " + c.to_pin);
        if (out->kind != in->kind)
            throw NetworkError("kind mismatch on data connection " + c.from_fb +
                               "." + c.from_pin + " -> " + c.to_fb + "." + c.to_pin);
        if (src.device != dst.device)
            throw NetworkError("data connection " + c.from_fb + "." + c.from_pin +
                               " -> " + c.to_fb + "." + c.to_pin +
                               " crosses devices");
        std::string sink = c.to_fb + "." + c.to_pin;
        if (std::find(seen_sinks.begin(), seen_sinks.end(), sink) !=
            seen_sinks.end())
            throw NetworkError("data input " + sink +
                               " has more than one incoming connection");
        seen_sinks.push_back(sink);
    }
}

}  // namespace fbx::core
