#pragma once

#include <iosfwd>
#include <string>

#include "fbx/fbtype.hpp"

namespace fbx::app {

class NetdefError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Network-definition file format (line oriented, `#` comments):
//
//   [devices]
//   netop = 127.0.0.1
//
//   [fbs]
//   CYCLE = E_CYCLE @netop DT=500
//   PUB   = PUBLISH_3 @netop ID=fbdk[].ip[127.0.0.1:61499]
//
//   [events]
//   CYCLE.EO = I_OV.REQ
//
//   [data]
//   RS_OV.Q = PUB.SD_1
//
// Parsing resolves FB types and validates every network invariant;
// errors carry the line number.
core::NetworkDecl load_netdef(const std::string& path);
core::NetworkDecl parse_netdef(std::istream& in, const std::string& origin);

// The subgraph of FBs on `device` plus their intra-device connections.
core::NetworkDecl slice_for_device(const core::NetworkDecl& doc,
                                   const std::string& device);

}  // namespace fbx::app
