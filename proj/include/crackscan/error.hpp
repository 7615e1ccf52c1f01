#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crackscan {

/// Raised when a file cannot be decoded. Carries the byte offset at which
/// decoding stopped making sense.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

private:
  std::size_t byte_offset_;
};

}  // namespace crackscan
