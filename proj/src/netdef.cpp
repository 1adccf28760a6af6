#include "fbx/netdef.hpp"

#include <fstream>
#include <sstream>

namespace fbx::app {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& origin, size_t line,
                       const std::string& message) {
    throw NetdefError(origin + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string word;
    while (in >> word)
        out.push_back(word);
    return out;
}

core::ConnDecl parse_conn(const std::string& origin, size_t line,
                          const std::string& from, const std::string& to) {
    auto split = [&](const std::string& s) {
        size_t dot = s.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
            fail(origin, line, "expected FB.PIN, got '" + s + "'");
        return std::make_pair(s.substr(0, dot), s.substr(dot + 1));
    };
    auto [ff, fp] = split(from);
    auto [tf, tp] = split(to);
    return {ff, fp, tf, tp};
}

}  // namespace

core::NetworkDecl parse_netdef(std::istream& in, const std::string& origin) {
    core::NetworkDecl net;
    std::string section;
    std::string raw;
    size_t lineno = 0;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = trim(line.substr(0, hash));
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(origin, lineno, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "devices" && section != "fbs" && section != "events" &&
                section != "data")
                fail(origin, lineno, "unknown section [" + section + "]");
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(origin, lineno, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(origin, lineno, "empty key or value");

        if (section.empty())
            fail(origin, lineno, "entry before any section header");

        if (section == "devices") {
            if (net.find_device(key))
                fail(origin, lineno, "duplicate device " + key);
            net.devices.push_back({key, value});
        } else if (section == "fbs") {
            // NAME = TYPE @DEVICE [PIN=LITERAL ...]
            std::vector<std::string> words = split_ws(value);
            if (words.size() < 2 || words[1].front() != '@')
                fail(origin, lineno, "expected TYPE @DEVICE after '='");
            if (net.find_fb(key))
                fail(origin, lineno, "duplicate fb " + key);
            auto type = core::lookup_type(words[0]);
            if (!type)
                fail(origin, lineno, "unknown FB type " + words[0]);
            core::FBDecl fb{key, *type, words[1].substr(1), {}};
            for (size_t i = 2; i < words.size(); ++i) {
                size_t peq = words[i].find('=');
                if (peq == std::string::npos || peq == 0)
                    fail(origin, lineno, "expected PIN=LITERAL, got '" + words[i] +
                                             "'");
                fb.params[words[i].substr(0, peq)] = words[i].substr(peq + 1);
            }
            net.fbs.push_back(std::move(fb));
        } else if (section == "events") {
            net.events.push_back(parse_conn(origin, lineno, key, value));
        } else {
            net.data.push_back(parse_conn(origin, lineno, key, value));
        }
    }

    try {
        net.validate();
    } catch (const core::NetworkError& e) {
        throw NetdefError(origin + ": " + e.what());
    }
    return net;
}

core::NetworkDecl load_netdef(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw NetdefError("cannot open " + path);
    return parse_netdef(in, path);
}

core::NetworkDecl slice_for_device(const core::NetworkDecl& doc,
                                   const std::string& device) {
    if (!doc.find_device(device))
        throw NetdefError("unknown device " + device);
    core::NetworkDecl slice;
    for (const core::DeviceDecl& d : doc.devices)
        if (d.name == device)
            slice.devices.push_back(d);
    for (const core::FBDecl& fb : doc.fbs)
        if (fb.device == device)
            slice.fbs.push_back(fb);
    auto on_device = [&](const core::ConnDecl& c) {
        const core::FBDecl* from = doc.find_fb(c.from_fb);
        const core::FBDecl* to = doc.find_fb(c.to_fb);
        return from && to && from->device == device && to->device == device;
    };
    for (const core::ConnDecl& c : doc.events)
        if (on_device(c))
            slice.events.push_back(c);
    for (const core::ConnDecl& c : doc.data)
        if (on_device(c))
            slice.data.push_back(c);
    return slice;
}

}  // namespace fbx::app
