#ifndef ADL_CORE_ERROR_H_
#define ADL_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace adl {

// Caller passed an argument outside an operation's precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A config, body description, or container file could not be read.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulation step was rejected; the input state is left untouched.
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An environment reset could not find a valid start configuration.
class ResetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adl

#endif  // ADL_CORE_ERROR_H_
