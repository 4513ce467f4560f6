#pragma once

#include <stdexcept>
#include <string>

namespace collopt {

/// Bad configuration, CLI arguments, or malformed input documents. Exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failures (missing file, unwritable output). Exit 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// The LP baseline has no feasible allocation. Exit 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace collopt
