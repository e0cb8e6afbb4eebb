#include "util.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace vgkit {

const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::IoError: return "io_error";
    case Status::ParseError: return "parse_error";
    case Status::ValidationError: return "validation_error";
    case Status::FormatError: return "format_error";
    case Status::InsufficientData: return "insufficient_data";
    case Status::TrainingError: return "training_error";
    case Status::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_double_or_empty(bool present, double v) {
  return present ? format_double(v) : std::string();
}

std::string fnv1a64_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  return std::string(buf, 16);
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    line = std::move(t);
    return true;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Status::IoError, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Status::IoError, "cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Status::IoError, "write failed: " + path);
}

double parse_double_field(const std::string& field, const std::string& what) {
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    // from_chars does not accept "inf"/"nan"; fall back for those.
    errno = 0;
    char* end = nullptr;
    v = std::strtod(field.c_str(), &end);
    if (errno != 0 || end != field.c_str() + field.size() || field.empty())
      fail(Status::ParseError, "bad numeric value for " + what + ": '" + field + "'");
  }
  return v;
}

long parse_long_field(const std::string& field, const std::string& what) {
  long v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    fail(Status::ParseError, "bad integer value for " + what + ": '" + field + "'");
  return v;
}

}  // namespace vgkit
