#pragma once

#include <stdexcept>
#include <string>

namespace amap {

// Coarse error families; the fine-grained reason lives in the message.
enum class ErrorKind {
  Io,       // missing/unreadable/unwritable files
  Parse,    // malformed input content
  Config,   // invalid configuration or scene spec
  Geometry, // non-positive depth, frame mismatch, degenerate input
  Pipeline, // stage-level failures (coverage gaps, degenerate baselines, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorKind::Io, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) {
  throw Error(ErrorKind::Parse, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorKind::Config, msg);
}
[[noreturn]] inline void throw_geometry(const std::string& msg) {
  throw Error(ErrorKind::Geometry, msg);
}
[[noreturn]] inline void throw_pipeline(const std::string& msg) {
  throw Error(ErrorKind::Pipeline, msg);
}

}  // namespace amap
