#ifndef DNR_ERRORS_HPP
#define DNR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dnr {

// Error categories map onto CLI exit codes:
//   Validation -> 2, Numerical -> 3, Io -> 4
enum class ErrorKind { Validation, Numerical, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message),
          kind_(kind),
          code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    // machine-readable code, e.g. "dangling_bus_ref"
    const std::string& code() const { return code_; }

    int exit_code() const {
        switch (kind_) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::Numerical: return 3;
        case ErrorKind::Io: return 4;
        }
        return 1;
    }

private:
    ErrorKind kind_;
    std::string code_;
};

inline Error validation_error(const std::string& code, const std::string& msg) {
    return Error(ErrorKind::Validation, code, msg);
}
inline Error numerical_error(const std::string& code, const std::string& msg) {
    return Error(ErrorKind::Numerical, code, msg);
}
inline Error io_error(const std::string& code, const std::string& msg) {
    return Error(ErrorKind::Io, code, msg);
}

} // namespace dnr

#endif
