#ifndef BB84_ERROR_H_
#define BB84_ERROR_H_

#include <stdexcept>
#include <string>

namespace bb84 {

// Base for every domain error raised by the library. kind() is a stable
// identifier used by the command-line front end ("error: <kind>: <detail>").
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string &detail) : std::runtime_error(detail), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

class DomainError : public Error {
  public:
    explicit DomainError(const std::string &detail) : Error("DomainError", detail) {}
};

class NonPhysicalState : public Error {
  public:
    explicit NonPhysicalState(const std::string &detail) : Error("NonPhysicalState", detail) {}
};

class InvalidChoi : public Error {
  public:
    explicit InvalidChoi(const std::string &detail) : Error("InvalidChoi", detail) {}
};

class Infeasible : public Error {
  public:
    explicit Infeasible(const std::string &detail) : Error("Infeasible", detail) {}
};

class InsufficientData : public Error {
  public:
    explicit InsufficientData(const std::string &detail) : Error("InsufficientData", detail) {}
};

class InvalidInput : public Error {
  public:
    explicit InvalidInput(const std::string &detail) : Error("InvalidInput", detail) {}
};

}  // namespace bb84

#endif  // BB84_ERROR_H_
