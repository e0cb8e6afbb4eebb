#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vgkit {

// Error categories, mirrored one-to-one by the vgk_status codes of the C API.
enum class Status {
  Ok = 0,
  IoError,
  ParseError,
  ValidationError,
  FormatError,
  InsufficientData,
  TrainingError,
  InvalidArgument,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
 public:
  Error(Status status, std::string message)
      : std::runtime_error(std::move(message)), status_(status) {}

  Status status() const { return status_; }

 private:
  Status status_;
};

[[noreturn]] inline void fail(Status status, const std::string& message) {
  throw Error(status, message);
}

}  // namespace vgkit
