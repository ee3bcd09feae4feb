#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace crilm {

// Error categories map directly to CLI exit codes.
enum class ErrorKind { Usage = 1, Data = 2, Network = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message),
          kind_(kind),
          code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline Error usage_error(std::string code, const std::string& msg) {
    return Error(ErrorKind::Usage, std::move(code), msg);
}
inline Error data_error(std::string code, const std::string& msg) {
    return Error(ErrorKind::Data, std::move(code), msg);
}
inline Error network_error(std::string code, const std::string& msg) {
    return Error(ErrorKind::Network, std::move(code), msg);
}

} // namespace crilm
