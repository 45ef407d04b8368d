#pragma once

#include <stdexcept>
#include <string>

namespace btsampler {

// Malformed or inconsistent input data (files, records, corpora).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed arguments outside an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The file system refused a read or write.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace btsampler
