#pragma once

#include <stdexcept>

namespace prophet {

// Raw data that cannot form a valid distribution, instance or order.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state space or enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prophet
