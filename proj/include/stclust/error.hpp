#pragma once

#include <stdexcept>
#include <string>

namespace stclust {

/// Base of every error raised by the library. The CLI maps `IoError` to exit
/// code 3 and every other `Error` to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoundsError : public Error { using Error::Error; };
class UnitError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class CoverageError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace stclust
