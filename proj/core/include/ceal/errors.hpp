#pragma once

#include <stdexcept>
#include <string>

namespace ceal {

// Malformed PGM/UMAP/CSV/model payloads.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by a caller-supplied argument.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Object used in a state that does not support the request.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NoContourError : public std::invalid_argument {
 public:
  NoContourError() : std::invalid_argument("no contour: mask has no foreground pixel") {}
};

// External predictor broke the command or UMAP contract.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(const std::string& what, int pass_index = -1)
      : std::runtime_error(what), pass_index_(pass_index) {}
  int pass_index() const noexcept { return pass_index_; }

 private:
  int pass_index_;
};

// Pool bookkeeping would be corrupted (unknown id, id in the wrong set).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace ceal
