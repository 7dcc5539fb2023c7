#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace screwkin {

// Entry point of the command-line tool; argv-style arguments without the
// program name. Writes the report JSON to out and diagnostics to err.
// Returns 0 on success, 2 on input validation failure, 3 on numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Deterministic report serialization: keys in insertion order, doubles with
// up to 17 significant digits, two-space indentation. Identical payloads
// always produce identical bytes.
std::string dump_report(const nlohmann::ordered_json& j);

// Library/report format version.
const char* version_string();

}  // namespace screwkin
