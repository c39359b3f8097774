#pragma once

#include "scanb/common.hpp"

#include <string>
#include <vector>

namespace scanb {

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
std::string csv_field(const std::string& value);

/// Split one CSV line, honoring double-quoted fields.
std::vector<std::string> parse_csv_line(const std::string& line);

/// One sample per row, comma-separated decimal coordinates.
/// Throws InputError with the 1-based row number on malformed numbers,
/// and reports inconsistent row widths as a dimension error.
std::vector<Sample> read_sample_csv(const std::string& path);

void write_sample_csv(const std::string& path, const std::vector<Sample>& samples,
                      bool header = false);

}  // namespace scanb
