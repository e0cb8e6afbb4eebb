#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace vgkit {

// Shortest decimal representation that round-trips the exact double value.
// All file output goes through this so repeated runs are byte-identical.
std::string format_double(double v);

std::string format_double_or_empty(bool present, double v);

// FNV-1a over the bytes of s, as a 16-digit lowercase hex string.
std::string fnv1a64_hex(std::string_view s);

std::string trim(std::string_view s);

// Plain comma split, no quoting. The formats this toolkit defines never
// emit quoted fields.
std::vector<std::string> split_csv(std::string_view line);

// Reads the next line that is neither blank nor a '#' comment.
// Returns false at end of stream. line_no counts every physical line read.
bool next_data_line(std::istream& in, std::string& line, int& line_no);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

double parse_double_field(const std::string& field, const std::string& what);
long parse_long_field(const std::string& field, const std::string& what);

}  // namespace vgkit
