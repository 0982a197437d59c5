#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dsurf {

using Complex = std::complex<double>;

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Spinor = Eigen::Vector4cd;
using CoSpinor = Eigen::RowVector4cd;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: expression syntax, immersion file layout, bad arguments.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(format(msg, line, column)), message_(msg), line_(line), column_(column) {}

  // The message without the line/column prefix.
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& msg, int line, int column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (column > 0) out += "column " + std::to_string(column) + ": ";
    return out + msg;
  }

  std::string message_;
  int line_;
  int column_;
};

// A function evaluated outside its real domain (log of a negative, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate immersion, frame-branch jump, non-rotation input, ...
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A configured resource cap (matrix dimension) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsurf
