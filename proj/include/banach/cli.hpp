#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "banach/serialize.hpp"

namespace banach::cli {

/// Exit codes: 0 decision or witness established, 2 obstruction found,
/// 1 error (a JSON error object is written to err).
enum Exit : int { kOk = 0, kError = 1, kObstruction = 2 };

/// Throws ParseError describing the first schema violation.
void validate_manifest(const Json& manifest);

/// Executes a validated v1 job manifest.
int run_manifest(const Json& manifest, std::ostream& out, std::ostream& err);

/// Command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace banach::cli
