#pragma once

#include <stdexcept>
#include <string>

namespace hsrnet {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NumericInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class StaleId : public Error {
 public:
  using Error::Error;
};

class DegenerateData : public Error {
 public:
  using Error::Error;
};

class PackingInfeasible : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnreliableLambda : public Error {
 public:
  using Error::Error;
};

class Divergence : public Error {
 public:
  using Error::Error;
};

class InternalConsistency : public Error {
 public:
  using Error::Error;
};

}  // namespace hsrnet
