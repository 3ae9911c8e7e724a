#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iss {

// Raised when an internal invariant is violated (a bug, not bad input).
class invariant_error : public std::logic_error {
public:
    explicit invariant_error(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool ok, const std::string& message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

inline void ensure(bool ok, const std::string& message) {
    if (!ok) {
        throw invariant_error(message);
    }
}

using Index = std::size_t;

}  // namespace iss
