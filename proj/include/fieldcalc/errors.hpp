#ifndef FIELDCALC_ERRORS_HPP
#define FIELDCALC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fieldcalc {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public EvalError {
 public:
  using EvalError::EvalError;
};

class ArityError : public EvalError {
 public:
  using EvalError::EvalError;
};

class SensorMissing : public EvalError {
 public:
  using EvalError::EvalError;
};

class FuelExhausted : public EvalError {
 public:
  using EvalError::EvalError;
};

class MalformedEnv : public EvalError {
 public:
  using EvalError::EvalError;
};

class WellFormednessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CoherenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fieldcalc

#endif
