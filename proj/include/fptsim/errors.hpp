#pragma once

#include <stdexcept>
#include <string>

namespace fptsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StandardizationError : public Error { using Error::Error; };
class UnsupportedFamilyError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class InfeasibleTargetError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class OracleDomainError : public Error { using Error::Error; };
class BranchResolutionError : public Error { using Error::Error; };
class WrongRegimeError : public Error { using Error::Error; };
class EmptySampleError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

}  // namespace fptsim
