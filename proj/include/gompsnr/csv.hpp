#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gompsnr {

// Minimal RFC-4180-style CSV: double quotes escape commas, quotes and
// newlines inside fields. Rows split on LF; a trailing CR is stripped.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Quotes the field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace gompsnr
