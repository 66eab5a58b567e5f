#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "smh/graph.hpp"

namespace smh {

/// Reads a SteinLib "STP Format Version 1.0" instance.
///
/// File ids are 1-based and become internal ids id-1. Parallel edges keep
/// their minimum weight, self-loops are dropped. Unknown sections are
/// skipped. Throws ParseError. `fallback_name` is used when the file has
/// no `Name` entry in its Comment section.
SteinerInstance parse_stp(std::istream& in, const std::string& fallback_name = {});
SteinerInstance read_stp_file(const std::filesystem::path& path);

/// Writes `instance` in the same format, using its file ids.
void write_stp(std::ostream& out, const SteinerInstance& instance);

}  // namespace smh
