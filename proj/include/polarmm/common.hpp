#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace polarmm {

// Probabilities and information values are doubles; information is in bits
// (base-2 logs everywhere). Mismatched information may be -infinity, which is
// carried as an ordinary double.
inline constexpr double kProbTol = 1e-12;

inline double neg_inf() { return -std::numeric_limits<double>::infinity(); }
inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

// Error categories map one-to-one onto CLI exit codes.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitData = 3,
    kExitCapacity = 4,
};

}  // namespace polarmm
