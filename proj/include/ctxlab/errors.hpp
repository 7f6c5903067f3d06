#pragma once

#include <stdexcept>
#include <string>

namespace ctxlab {

/// Session transport failed after the given number of attempts; retryable.
class TransportError : public std::runtime_error {
  public:
    TransportError(const std::string& what, int attempts)
        : std::runtime_error(what), attempts_(attempts) {}
    int attempts() const { return attempts_; }

  private:
    int attempts_;
};

/// Provider replied, but the reply did not match the wire contract.
class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A result item could not be parsed against its schema.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::string variable)
        : std::runtime_error(what), variable_(std::move(variable)) {}
    const std::string& variable() const { return variable_; }

  private:
    std::string variable_;
};

/// Router produced no usable branch after the reprompt budget.
class RoutingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ctxlab
