#pragma once

/**
 * @file localfield.hpp
 * @brief Completions of quadratic fields: p-th powers, roots of unity, and
 * splitting of tame primes in the cyclotomic Z_p-tower.
 *
 * The p-th power tests are finite congruences modulo p^2 (p >= 5):
 *
 *  - ramified (e = 2, uniformizer pi = sqrt m): (U^1)^p = 1 + m^3, since
 *    v_pi(p) = 2 and log/exp are inverse isometries on 1 + m^2 for p >= 5.
 *    Writing u^(p-1) - 1 = A + B sqrt(m), the principal part of u lies in
 *    1 + m^3 iff p^2 | A and p | B.
 *  - inert / split (e = 1): (U^1)^p = 1 + p^2 O, so u is a p-th power iff
 *    u^(q-1) = 1 (mod p^2) where q is the residue field size.
 *
 * Raising to q - 1 kills the Teichmueller part, and because gcd(p, q-1) = 1
 * this does not change whether the principal part is a p-th power.
 *
 * The quartic field K = Q(sqrt(pq), sqrt(-d)) is unramified over K+ at p,
 * so pi-adic valuations of elements of K+ are the same in K_p and K+_p and
 * the threshold v_pi(log u) < 3 reads identically in both.
 */

#include <algorithm>
#include <string>
#include <vector>

#include "prational/arith.hpp"
#include "prational/quadratic.hpp"

namespace prational {

enum class SplitKind { split, inert, ramified };

inline std::string to_string(SplitKind k) {
    switch (k) {
        case SplitKind::split: return "split";
        case SplitKind::inert: return "inert";
        case SplitKind::ramified: return "ramified";
    }
    return "?";
}

struct LocalContext {
    i64 p = 0;
    QuadField field;
    SplitKind kind = SplitKind::inert;
    i64 roots[2] = {0, 0};  // split only: both square roots of m mod p^2

    i64 modulus() const { return p * p; }
    int place_count() const { return kind == SplitKind::split ? 2 : 1; }
};

/// a + b sqrt(m) in O / p^2 O, canonical residues in [0, p^2).
struct ModSqrtElem {
    i64 a = 0;
    i64 b = 0;
    friend bool operator==(const ModSqrtElem&, const ModSqrtElem&) = default;
};

namespace detail {

inline void require_p(i64 p) {
    if (p < 5 || !is_prime(p)) throw domain_error("local tests need a prime p >= 5");
}

inline ModSqrtElem mul(const ModSqrtElem& x, const ModSqrtElem& y, i64 m, i64 md) {
    const u64 M = static_cast<u64>(md);
    const u64 mm = static_cast<u64>(mod(m, md));
    u64 a = (mul_mod(x.a, y.a, M) + mul_mod(mul_mod(x.b, y.b, M), mm, M)) % M;
    u64 b = (mul_mod(x.a, y.b, M) + mul_mod(x.b, y.a, M)) % M;
    return {static_cast<i64>(a), static_cast<i64>(b)};
}

inline ModSqrtElem pow(ModSqrtElem x, u64 e, i64 m, i64 md) {
    ModSqrtElem r{1 % md, 0};
    while (e > 0) {
        if (e & 1) r = mul(r, x, m, md);
        x = mul(x, x, m, md);
        e >>= 1;
    }
    return r;
}

/// Square root of a quadratic residue n modulo an odd prime p.
inline i64 sqrt_mod_prime(i64 n, i64 p) {
    n = mod(n, p);
    if (n == 0) return 0;
    const u64 P = static_cast<u64>(p);
    if (pow_mod(n, (P - 1) / 2, P) != 1) throw domain_error("sqrt_mod_prime: non-residue");
    u64 q = P - 1;
    int s = 0;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    u64 z = 2;
    while (pow_mod(z, (P - 1) / 2, P) != P - 1) ++z;
    u64 c = pow_mod(z, q, P);
    u64 r = pow_mod(n, (q + 1) / 2, P);
    u64 t = pow_mod(n, q, P);
    int mexp = s;
    while (t != 1) {
        int i = 0;
        u64 tt = t;
        while (tt != 1) {
            tt = mul_mod(tt, tt, P);
            ++i;
        }
        u64 b = c;
        for (int j = 0; j < mexp - i - 1; ++j) b = mul_mod(b, b, P);
        r = mul_mod(r, b, P);
        c = mul_mod(b, b, P);
        t = mul_mod(t, c, P);
        mexp = i;
    }
    return static_cast<i64>(r);
}

}  // namespace detail

/// Decomposition type of p in the field, with Hensel-lifted roots when split.
inline LocalContext classify_splitting(const QuadField& field, i64 p) {
    detail::require_p(p);
    LocalContext ctx;
    ctx.p = p;
    ctx.field = field;
    if (field.disc % p == 0) {
        ctx.kind = SplitKind::ramified;
    } else if (kronecker(field.disc, p) == 1) {
        ctx.kind = SplitKind::split;
        const i64 md = p * p;
        i64 r0 = detail::sqrt_mod_prime(field.m, p);
        // (r0 + k p)^2 = m (mod p^2)  <=>  2 r0 k = (m - r0^2)/p (mod p)
        i64 rhs = mod((mod(field.m, md) - static_cast<i64>(mul_mod(r0, r0, md))) / p, p);
        i64 k = mul_mod(rhs, inv_mod(2 * r0, p), p);
        i64 r = mod(r0 + k * p, md);
        ctx.roots[0] = std::min(r, md - r);
        ctx.roots[1] = std::max(r, md - r);
    } else {
        ctx.kind = SplitKind::inert;
    }
    return ctx;
}

/// Reduce an integral element into O / p^2 O.
inline ModSqrtElem reduce_mod_p2(const QuadElem& e, i64 p) {
    const i64 md = p * p;
    mpz_class M = md;
    mpz_class x = e.x() % M, y = e.y() % M;
    i64 a = mod(x.get_si(), md), b = mod(y.get_si(), md);
    if (e.den() == 2) {
        i64 inv2 = inv_mod(2, md);
        a = mul_mod(a, inv2, md);
        b = mul_mod(b, inv2, md);
    }
    return {a, b};
}

/// One flag per place above p: is u a p-th power in that completion?
inline std::vector<bool> is_pth_power_local(const ModSqrtElem& u, const LocalContext& ctx) {
    detail::require_p(ctx.p);
    const i64 p = ctx.p;
    const i64 md = p * p;
    const i64 m = ctx.field.m;
    switch (ctx.kind) {
        case SplitKind::ramified: {
            ModSqrtElem w = detail::pow(u, static_cast<u64>(p - 1), m, md);
            return {mod(w.a - 1, md) == 0 && w.b % p == 0};
        }
        case SplitKind::inert: {
            ModSqrtElem w = detail::pow(u, static_cast<u64>(p * p - 1), m, md);
            return {w == ModSqrtElem{1, 0}};
        }
        case SplitKind::split: {
            std::vector<bool> flags;
            for (i64 r : ctx.roots) {
                u64 image = (u.a + mul_mod(u.b, r, md)) % md;
                flags.push_back(pow_mod(image, static_cast<u64>(p - 1), md) == 1);
            }
            return flags;
        }
    }
    return {};
}

inline std::vector<bool> is_pth_power_local(const QuadElem& u, const LocalContext& ctx) {
    detail::require_p(ctx.p);
    mpz_class n = u.norm();
    if (n != 1 && n != -1) throw domain_error("is_pth_power_local: |N(u)| != 1");
    return is_pth_power_local(reduce_mod_p2(u, ctx.p), ctx);
}

/// mu_p lies in a tame local field with residue field of size t iff p | t - 1.
inline bool mu_p_in_local(i64 residue_field_size, i64 p) {
    if (residue_field_size < 2) throw domain_error("mu_p_in_local: residue field size >= 2");
    return (residue_field_size - 1) % p == 0;
}

/// v_p(t^k - 1), computed modulo the largest power of p below 2^62.
inline int valuation_of_power_minus_one(i64 q, i64 exponent, i64 p) {
    i64 md = 1;
    int cap = 0;
    while (md <= (i64{1} << 62) / p) {
        md *= p;
        ++cap;
    }
    u64 w = pow_mod(static_cast<u64>(mod(q, md)), static_cast<u64>(exponent), static_cast<u64>(md));
    i64 diff = mod(static_cast<i64>(w) - 1, md);
    if (diff == 0) throw domain_error("valuation exceeds working precision");
    return padic_valuation(diff, p).v;
}

/// Number of places of the cyclotomic Z_p-extension above a prime of residue
/// degree f over q: p^max(0, v_p(t^d0 - 1) - 1) with t = q^f, d0 = ord_p(t).
inline i64 tower_places(i64 q, int f, i64 p) {
    detail::require_p(p);
    if (q == p) throw domain_error("tower_places: q must differ from p");
    if (!is_prime(q)) throw domain_error("tower_places: q must be prime");
    if (f != 1 && f != 2 && f != 4) throw domain_error("tower_places: f must be 1, 2 or 4");
    i64 t_mod_p = static_cast<i64>(pow_mod(static_cast<u64>(q % p), static_cast<u64>(f),
                                           static_cast<u64>(p)));
    i64 d0 = mult_order(t_mod_p, p);
    int v = valuation_of_power_minus_one(q, static_cast<i64>(f) * d0, p);
    i64 s = 1;
    for (int i = 1; i < v; ++i) s *= p;
    return s;
}

}  // namespace prational
