#pragma once

#include <stdexcept>
#include <string>

namespace extenso {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation left the domain of a function (ln of a non-positive number,
/// 0^negative, a point outside a field's domain box).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Arithmetic between jets of different dimension or order.
class JetMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

} // namespace extenso
