#pragma once

#include <array>

namespace fixtures {

// Built-in example Hamiltonians (n = 1).
inline constexpr std::array<const char*, 3> kBuiltinHamiltonians{
    "0.5*(x1^2 + x2^2 + x3^2 + x4^2)",
    "x1*x2 + x3^4",
    "sin(x1) + exp(x2)/4",
};

inline constexpr const char* kQuadratic = kBuiltinHamiltonians[0];

}  // namespace fixtures
