/**
 * @file error.hpp
 * @brief Exception types shared by all fdaclip modules.
 *
 * The CLI maps each family onto a process exit code: configuration and
 * usage problems exit 1, bad input data exits 2, encoder failures exit 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace fdaclip {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed on-disk content (raster headers, embedding store framing).
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdaclip
