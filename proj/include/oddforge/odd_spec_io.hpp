#pragma once

#include <filesystem>
#include <string>

#include "oddforge/odd_spec.hpp"

namespace oddforge {

// ODD file (JSON):
//
//   {
//     "version": 2,
//     "parent": 1,            // null for version 1
//     "parameters": [
//       {"name": "along_track", "kind": "continuous", "unit": "NM", "min": 0.08, "max": 3},
//       {"name": "surface", "kind": "categorical", "unit": "unitless", "values": ["asphalt"]}
//     ],
//     "restrictions": ["piano_present"]
//   }
//
// Every listed key is required. Saving a loaded document reproduces it up to
// object key order.

/// Parse a spec document. Throws FormatError on schema errors.
OddSpec parse_spec(const std::string& text);
std::string serialize_spec(const OddSpec& spec);

/// Throws IoError when the file cannot be read, FormatError on bad content.
OddSpec load_spec(const std::filesystem::path& path);
void save_spec(const OddSpec& spec, const std::filesystem::path& path);

}  // namespace oddforge
