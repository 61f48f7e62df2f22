#ifndef AEPLAB_ERRORS_HPP
#define AEPLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aeplab {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested object would exceed the configured dense-matrix capacity.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& msg) : Error(msg) {}
};

// Shapes or index sets do not fit together.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg) : Error(msg) {}
};

// An input violates a documented precondition (non-Hermitian matrix,
// non-stochastic transition row, non-orthonormal basis, ...).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// An iterative routine failed to reach its tolerance.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// A scalar parameter is outside its documented range.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

// The operation is not defined for the given model variant.
class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

}  // namespace aeplab

#endif
