#ifndef ULTRASHIFT_DIAGNOSTICS_HPP
#define ULTRASHIFT_DIAGNOSTICS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultrashift {

namespace codes {
inline constexpr const char* kSyntax = "E-SYNTAX";
inline constexpr const char* kUndeclared = "E-UNDECLARED";
inline constexpr const char* kDuplicate = "E-DUPLICATE";
inline constexpr const char* kNonAffine = "E-AFFINE";
inline constexpr const char* kGuardOverlap = "E-GUARD-OVERLAP";
inline constexpr const char* kGuardCover = "E-GUARD-COVER";
inline constexpr const char* kSink = "E-SINK";
inline constexpr const char* kDomain = "E-DOMAIN";
inline constexpr const char* kEmptyRange = "E-EMPTY-RANGE";
inline constexpr const char* kPath = "E-PATH";
inline constexpr const char* kEmitter = "E-EMITTER";
inline constexpr const char* kPeriod = "E-PERIOD";
}  // namespace codes

struct Diagnostic {
    std::string code;
    std::string message;
    int line = 0;
    int column = 0;

    std::string str() const {
        return std::to_string(line) + ":" + std::to_string(column) + ": " + code + ": " + message;
    }
};

using DiagnosticList = std::vector<Diagnostic>;

/// Carries diagnostics out of APIs that cannot return them by value.
class DiagnosticError : public std::runtime_error {
public:
    explicit DiagnosticError(DiagnosticList diags)
        : std::runtime_error(diags.empty() ? std::string("error") : diags.front().str()),
          diagnostics_(std::move(diags)) {}

    const DiagnosticList& diagnostics() const { return diagnostics_; }

private:
    DiagnosticList diagnostics_;
};

/// Value-or-diagnostics result of parsing.
template <class T>
struct Parsed {
    std::optional<T> value;
    DiagnosticList diagnostics;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    const T* operator->() const { return &*value; }
};

}  // namespace ultrashift

#endif  // ULTRASHIFT_DIAGNOSTICS_HPP
