#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Exit-code classes used by the CLI: 2 validation, 3 failed mathematical
// condition, 4 solver failure.
enum class ErrorClass { validation = 2, condition = 3, solver = 4 };

class Error : public std::runtime_error {
  public:
    Error(ErrorClass cls, std::string kind, const std::string &msg)
        : std::runtime_error(kind + ": " + msg), cls_(cls), kind_(std::move(kind)) {}
    ErrorClass error_class() const { return cls_; }
    const std::string &kind() const { return kind_; }

  private:
    ErrorClass cls_;
    std::string kind_;
};

struct StructuralError : Error {
    explicit StructuralError(const std::string &msg) : Error(ErrorClass::validation, "StructuralError", msg) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string &msg) : Error(ErrorClass::validation, "ParseError", msg) {}
};
struct NotAUnit : Error {
    explicit NotAUnit(const std::string &msg) : Error(ErrorClass::solver, "NotAUnit", msg) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string &msg) : Error(ErrorClass::solver, "BudgetExceeded", msg) {}
};
struct NotNilpotent : Error {
    explicit NotNilpotent(const std::string &msg) : Error(ErrorClass::validation, "NotNilpotent", msg) {}
};
struct NotMHS : Error {
    explicit NotMHS(const std::string &msg) : Error(ErrorClass::condition, "NotMHS", msg) {}
};
struct NotIsomorphismCase : Error {
    explicit NotIsomorphismCase(const std::string &msg) : Error(ErrorClass::solver, "NotIsomorphismCase", msg) {}
};
struct GenerationFailure : Error {
    explicit GenerationFailure(const std::string &msg) : Error(ErrorClass::solver, "GenerationFailure", msg) {}
};
struct InternalConsistencyError : Error {
    explicit InternalConsistencyError(const std::string &msg)
        : Error(ErrorClass::solver, "InternalConsistencyError", msg) {}
};
struct PairingEscape : Error {
    explicit PairingEscape(const std::string &msg) : Error(ErrorClass::condition, "PairingEscape", msg) {}
};
struct MalformedPairing : Error {
    explicit MalformedPairing(const std::string &msg) : Error(ErrorClass::validation, "MalformedPairing", msg) {}
};
struct Underdetermined : Error {
    explicit Underdetermined(const std::string &msg) : Error(ErrorClass::solver, "Underdetermined", msg) {}
};
struct Inconsistent : Error {
    explicit Inconsistent(const std::string &msg) : Error(ErrorClass::condition, "Inconsistent", msg) {}
};
struct NotGriffiths : Error {
    explicit NotGriffiths(const std::string &msg) : Error(ErrorClass::condition, "NotGriffiths", msg) {}
};
struct NotOpposite : Error {
    explicit NotOpposite(const std::string &msg) : Error(ErrorClass::condition, "NotOpposite", msg) {}
};
struct NotSplitOverQ : Error {
    explicit NotSplitOverQ(const std::string &msg) : Error(ErrorClass::condition, "NotSplitOverQ", msg) {}
};
struct RejectedInput : Error {
    explicit RejectedInput(const std::string &msg) : Error(ErrorClass::validation, "RejectedInput", msg) {}
};

} // namespace forge
