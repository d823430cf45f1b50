#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace edgelab {

// Thrown on precondition violations (bad dimensions, budgets, ranges).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative solver gives up.
struct no_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw invalid_input(what);
}

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline double binom_real(double n, double k)
{
    if (k < 0 || n < k) return 0.0;
    return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

inline std::uint64_t binom_u64(int n, int k)
{
    if (k < 0 || n < k) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

} // namespace edgelab
