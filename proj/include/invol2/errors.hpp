#pragma once

#include <stdexcept>
#include <string>

namespace invol2 {

// Base error. The CLI maps subclasses to exit codes:
// ParseError -> 2, DegreeOverflow -> 3, everything else -> 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivisionByZero : Error {
  explicit DivisionByZero(const std::string& msg = "division by zero") : Error(msg) {}
};

struct DegreeOverflow : Error {
  explicit DegreeOverflow(const std::string& msg) : Error(msg) {}
};

struct AlreadySquare : Error {
  explicit AlreadySquare(const std::string& msg = "alpha is already a square") : Error(msg) {}
};

struct ZeroBeta : Error {
  explicit ZeroBeta(const std::string& msg = "quaternion parameter beta must be nonzero") : Error(msg) {}
};

struct ZeroEntry : Error {
  explicit ZeroEntry(const std::string& msg = "diagonal entry must be nonzero") : Error(msg) {}
};

struct NotMatrixAlgebra : Error {
  explicit NotMatrixAlgebra(const std::string& msg = "algebra is not a full matrix algebra") : Error(msg) {}
};

struct NonSymmetricEntry : Error {
  explicit NonSymmetricEntry(const std::string& msg = "hermitian entry is not symmetric") : Error(msg) {}
};

struct NonUnitEntry : Error {
  explicit NonUnitEntry(const std::string& msg = "hermitian entry is not a unit") : Error(msg) {}
};

struct AltNotLine : Error {
  explicit AltNotLine(const std::string& msg = "Alt is not a line spanned by a unit") : Error(msg) {}
};

struct SymplecticFactor : Error {
  explicit SymplecticFactor(const std::string& msg = "factor involution is symplectic") : Error(msg) {}
};

struct NotSubalgebra : Error {
  explicit NotSubalgebra(const std::string& msg = "not a subalgebra of the ambient algebra") : Error(msg) {}
};

struct BadChoice : Error {
  explicit BadChoice(const std::string& msg) : Error(msg) {}
};

struct WrongShape : Error {
  explicit WrongShape(const std::string& msg) : Error(msg) {}
};

struct IterationCapExceeded : Error {
  explicit IterationCapExceeded(const std::string& msg) : Error(msg) {}
};

struct NotIsotropic : Error {
  explicit NotIsotropic(const std::string& msg = "involution is anisotropic") : Error(msg) {}
};

struct SquareInput : Error {
  explicit SquareInput(const std::string& msg = "x^2 must not be a square") : Error(msg) {}
};

struct SearchExhausted : Error {
  explicit SearchExhausted(const std::string& msg) : Error(msg) {}
};

struct DimensionCap : Error {
  explicit DimensionCap(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Raised when a postcondition the implementation re-verifies fails; always a bug.
struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

}  // namespace invol2
