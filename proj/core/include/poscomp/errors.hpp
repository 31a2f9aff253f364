#pragma once

#include <stdexcept>
#include <string>

namespace poscomp {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates its documented invariant (gamma <= 0, t < 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Threshold in mean + k*sigma mode asked for an empty score pool.
class EmptyPopulation : public Error {
 public:
  EmptyPopulation() : Error("empty score population") {}
  using Error::Error;
};

// Derivative requested outside the log branch of the utility.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Diversion left fewer than two families in the academic pool.
class DegeneratePool : public Error {
 public:
  using Error::Error;
};

}  // namespace poscomp
