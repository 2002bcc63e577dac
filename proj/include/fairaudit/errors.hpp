#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

// All recoverable failures carry a stable machine-readable kind (the error
// name surfaced by the CLI) plus a human-readable message.
class AuditError : public std::runtime_error {
public:
    AuditError(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

namespace errors {

inline AuditError missing_column(const std::string& col) {
    return {"MissingColumn", "column '" + col + "' not found in header"};
}
inline AuditError bad_value(std::size_t row, const std::string& col, const std::string& what) {
    return {"BadValue", "row " + std::to_string(row) + ", column '" + col + "': " + what};
}
inline AuditError missing_target(std::size_t row) {
    return {"MissingTarget", "record " + std::to_string(row) + " has no target label"};
}
inline AuditError unsupported_cardinality(std::size_t n) {
    return {"UnsupportedCardinality",
            "sensitive attribute declares " + std::to_string(n) + " values; exactly 2 supported"};
}

}  // namespace errors

}  // namespace fairaudit
