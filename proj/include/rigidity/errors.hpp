#ifndef RIGIDITY_ERRORS_HPP
#define RIGIDITY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rigidity {

// Failure classes map onto CLI exit codes: config errors -> 2,
// budget overruns -> 3, precision exhaustion -> 4, violated
// certified conditions -> 5.
enum class ErrorCode {
    ConfigError,
    BudgetExceeded,       // window / box / scan / degree / digit caps
    PrecisionExhausted,   // radius too wide to decide on the circle
    ConditionViolated,    // a certified inequality failed where required
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    int exit_code() const noexcept {
        switch (code_) {
            case ErrorCode::ConfigError: return 2;
            case ErrorCode::BudgetExceeded: return 3;
            case ErrorCode::PrecisionExhausted: return 4;
            case ErrorCode::ConditionViolated: return 5;
        }
        return 1;
    }

private:
    ErrorCode code_;
};

}  // namespace rigidity

#endif
