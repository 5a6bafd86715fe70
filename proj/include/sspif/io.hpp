#pragma once

#include <string>

namespace sspif {

/// Writes `content` to `path` via a sibling temporary file and rename, so
/// readers never observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace sspif
