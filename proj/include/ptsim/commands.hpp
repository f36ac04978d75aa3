#pragma once

#include <iosfwd>
#include <string_view>

#include "ptsim/config.hpp"

namespace ptsim {

enum class Command { sweep, threshold, crossing, validate, schur };

/// Throws ValidationError for unknown names.
Command parse_command(std::string_view name);

/// Runs one command and returns the process exit status: 0 on success, the
/// ErrorKind value for library errors, 2 for failed validation suites.
int run_command(const RunConfig& config, Command command, std::ostream& out, std::ostream& err);

}  // namespace ptsim
