#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "common.hpp"

namespace edgelab {

using rational = boost::multiprecision::cpp_rational;
using bigint = boost::multiprecision::cpp_int;

enum class Parity { even, odd };

// x^{2m} = sum_n c_n U_{2n}   (even),   x^{2m-1} = sum_n c_n U_{2n-1}   (odd), n = 0..m.
struct UExpansion {
    int m = 0;
    Parity parity = Parity::even;
    std::vector<rational> coefficients;

    // Degree of the U polynomial carried by coefficient n.
    int u_degree(int n) const { return parity == Parity::even ? 2 * n : 2 * n - 1; }
};

inline bigint binom_big(int n, int k)
{
    if (k < 0 || k > n) return 0;
    bigint r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline UExpansion snyder_expand(int m, Parity parity)
{
    require(m >= 1, "snyder_expand: m must be positive");
    UExpansion e;
    e.m = m;
    e.parity = parity;
    e.coefficients.resize(m + 1);
    if (parity == Parity::even) {
        bigint den = bigint(2 * m + 1) << (2 * m);
        for (int n = 0; n <= m; ++n)
            e.coefficients[n] = rational(bigint(2 * n + 1) * binom_big(2 * m + 1, m - n), den);
    } else {
        bigint den = bigint(2 * m) << (2 * m - 1);
        for (int n = 0; n <= m; ++n)
            e.coefficients[n] = rational(bigint(2 * n) * binom_big(2 * m, m - n), den);
    }
    return e;
}

} // namespace edgelab
