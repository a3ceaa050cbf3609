#pragma once

#include <string>

#include "dig/network.hpp"

namespace dig {

/**
 * Network config format (JSON):
 *
 *   {
 *     "sites": ["north", "south"],          // or a bare site count
 *     "seasons": [
 *       {"end_fraction": 0.5,
 *        "growth": [-2, 1],
 *        "links": ["north->south", "1->2:0.5"],   // "from->to[:weight]"
 *        "self_drain": [0, 0]}                    // optional
 *     ]
 *   }
 *
 * Link endpoints are site names or 1-based indices. The last season's
 * end_fraction must be exactly 1.
 */
DynamicNetwork parse_network(const std::string& json_text);
std::string serialize_network(const DynamicNetwork& net);

DynamicNetwork load_network(const std::string& path);
void save_network(const DynamicNetwork& net, const std::string& path);

/// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);

} // namespace dig
