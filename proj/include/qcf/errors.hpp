#ifndef QCF_ERRORS_HPP
#define QCF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qcf {

// Exit-code categories used by the CLI dispatcher.
enum class ErrorCategory : int {
    usage = 2,        // bad input, domain/validation failures
    convergence = 3,  // iterative solver did not converge
    regime = 4,       // unsupported regime / geometry
    consistency = 5,  // internal cross-check failed
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(ErrorCategory::usage, msg) {}
};

struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double res_u, double res_phi)
        : Error(ErrorCategory::convergence, msg), residual_u(res_u), residual_phi(res_phi) {}
    double residual_u;
    double residual_phi;
};

struct RegimeError : Error {
    explicit RegimeError(const std::string& msg) : Error(ErrorCategory::regime, msg) {}
};

struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& msg) : Error(ErrorCategory::consistency, msg) {}
};

}  // namespace qcf

#endif
