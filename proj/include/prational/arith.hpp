#pragma once

/**
 * @file arith.hpp
 * @brief Integer number theory on 64-bit words.
 *
 * Deterministic Miller-Rabin, factorization (trial division followed by
 * Pollard-Brent rho), the Kronecker symbol, p-adic valuations and
 * multiplicative orders. Everything here is pure and reentrant.
 */

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace prational {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Raised for inputs outside an operation's domain.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// =============================================================================
// Modular helpers
// =============================================================================

/// Least nonnegative residue of a modulo m (m > 0).
constexpr i64 mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

constexpr u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Inverse of a modulo m; throws when gcd(a, m) != 1.
inline i64 inv_mod(i64 a, i64 m) {
    i64 old_r = mod(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
    }
    if (old_r != 1) throw domain_error("inv_mod: argument not invertible");
    return mod(old_s, m);
}

/// floor(sqrt(n)) for n >= 0.
constexpr u64 isqrt(u64 n) {
    if (n < 2) return n;
    u64 x = static_cast<u64>(__builtin_sqrt(static_cast<double>(n)));
    while (static_cast<u128>(x) * x > n) --x;
    while (static_cast<u128>(x + 1) * (x + 1) <= n) ++x;
    return x;
}

constexpr bool is_square(i64 n) {
    if (n < 0) return false;
    u64 r = isqrt(static_cast<u64>(n));
    return static_cast<i64>(r * r) == n;
}

// =============================================================================
// Primality
// =============================================================================

namespace detail {

constexpr bool mr_witness(u64 n, u64 a) {
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace detail

/// Deterministic for every 64-bit input (first twelve prime witnesses).
constexpr bool is_prime(u64 n) {
    constexpr u64 witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (u64 w : witnesses) {
        if (n == w) return true;
        if (n % w == 0) return false;
    }
    for (u64 w : witnesses)
        if (!detail::mr_witness(n, w)) return false;
    return true;
}

inline bool is_prime(i64 n) { return n >= 2 && is_prime(static_cast<u64>(n)); }
inline bool is_prime(int n) { return is_prime(static_cast<i64>(n)); }

// =============================================================================
// Factorization
// =============================================================================

struct PrimePower {
    i64 prime;
    int exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// |n| = prod prime^exponent with primes strictly increasing; sign kept apart.
struct Factorization {
    i64 n = 1;
    int sign = 1;
    std::vector<PrimePower> factors;

    i64 exponent_of(i64 prime) const {
        for (const auto& f : factors)
            if (f.prime == prime) return f.exponent;
        return 0;
    }
};

namespace detail {

inline u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mul_mod(x, x, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        constexpr u64 m = 128;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < m && i < r - k; ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void split_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    split_into(d, out);
    split_into(n / d, out);
}

}  // namespace detail

/// Complete factorization of |n|; trial division to 10^6, then Pollard rho.
inline Factorization factor(i64 n) {
    if (n == 0) throw domain_error("factor: n must be nonzero");
    Factorization result;
    result.n = n;
    result.sign = n < 0 ? -1 : 1;
    u64 rest = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);

    auto take = [&](u64 prime) {
        int e = 0;
        while (rest % prime == 0) {
            rest /= prime;
            ++e;
        }
        if (e > 0) result.factors.push_back({static_cast<i64>(prime), e});
    };
    take(2);
    constexpr u64 trial_bound = 1'000'000;
    for (u64 d = 3; d <= trial_bound && d * d <= rest; d += 2) take(d);
    if (rest > 1) {
        std::vector<u64> big;
        detail::split_into(rest, big);
        std::sort(big.begin(), big.end());
        for (std::size_t i = 0; i < big.size();) {
            std::size_t j = i;
            while (j < big.size() && big[j] == big[i]) ++j;
            result.factors.push_back({static_cast<i64>(big[i]), static_cast<int>(j - i)});
            i = j;
        }
    }
    return result;
}

inline bool is_squarefree(i64 n) {
    if (n == 0) return false;
    for (const auto& f : factor(n).factors)
        if (f.exponent > 1) return false;
    return true;
}

/// Squarefree kernel with sign: n = core * square.
inline i64 squarefree_core(i64 n) {
    if (n == 0) throw domain_error("squarefree_core: n must be nonzero");
    auto fac = factor(n);
    i64 core = fac.sign;
    for (const auto& f : fac.factors)
        if (f.exponent % 2 == 1) core *= f.prime;
    return core;
}

// =============================================================================
// Kronecker symbol
// =============================================================================

/// (a | n), fully multiplicative in both arguments.
inline int kronecker(i64 a, i64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if (a % 2 == 0 && n % 2 == 0) return 0;

    int k = 1;
    // strip powers of 2 from n using (a|2) = (-1)^((a^2-1)/8) for odd a
    int twos = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++twos;
    }
    if (twos % 2 == 1) {
        i64 a8 = mod(a, 8);
        if (a8 == 3 || a8 == 5) k = -k;
    }
    if (n < 0) {
        n = -n;
        if (a < 0) k = -k;
    }
    // n odd positive: Jacobi symbol
    i64 x = mod(a, n);
    i64 y = n;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            i64 r = y % 8;
            if (r == 3 || r == 5) k = -k;
        }
        std::swap(x, y);
        if (x % 4 == 3 && y % 4 == 3) k = -k;
        x %= y;
    }
    return y == 1 ? k : 0;
}

// =============================================================================
// Valuations and orders
// =============================================================================

struct Valuation {
    int v;
    i64 cofactor;
    friend bool operator==(const Valuation&, const Valuation&) = default;
};

/// n = ell^v * cofactor with ell not dividing cofactor.
inline Valuation padic_valuation(i64 n, i64 ell) {
    if (n == 0) throw domain_error("padic_valuation: n must be nonzero");
    if (ell < 2) throw domain_error("padic_valuation: ell must be prime");
    int v = 0;
    while (n % ell == 0) {
        n /= ell;
        ++v;
    }
    return {v, n};
}

/// Euler phi via factorization.
inline i64 euler_phi(i64 m) {
    i64 phi = m;
    for (const auto& f : factor(m).factors) phi = phi / f.prime * (f.prime - 1);
    return phi;
}

/// Least k >= 1 with a^k = 1 (mod m).
inline i64 mult_order(i64 a, i64 m) {
    if (m < 2) throw domain_error("mult_order: modulus must be >= 2");
    i64 r = mod(a, m);
    if (std::gcd(r, m) != 1) throw domain_error("mult_order: gcd(a, m) != 1");
    i64 order = euler_phi(m);
    for (const auto& f : factor(order).factors) {
        for (int i = 0; i < f.exponent; ++i) {
            if (pow_mod(static_cast<u64>(r), static_cast<u64>(order / f.prime),
                        static_cast<u64>(m)) == 1)
                order /= f.prime;
            else
                break;
        }
    }
    return order;
}

}  // namespace prational
