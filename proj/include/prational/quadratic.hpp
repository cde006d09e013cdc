#pragma once

/**
 * @file quadratic.hpp
 * @brief Quadratic fields Q(sqrt m), exact element arithmetic and units.
 *
 * Elements are stored as (x + y*sqrt(m)) / den with den in {1, 2} and
 * arbitrary-precision coordinates. The fundamental unit comes from the
 * continued fraction of the ring generator omega (sqrt(m), or
 * (1 + sqrt(m))/2 when m = 1 mod 4): if omega = (P0 + sqrt m)/Q0 and the
 * complete quotients are (P_k + sqrt m)/Q_k, the convergent p_k/q_k gives
 *
 *     N(p_k - q_k * conj(omega)) = (-1)^(k+1) * Q_(k+1) / Q0,
 *
 * so the first k with Q_(k+1) = Q0 yields the fundamental unit and its
 * norm. The same recurrence run on residues gives the unit modulo any odd
 * modulus without ever forming the (exponentially large) coordinates.
 *
 * Valuations at ramified odd primes use v_l(e) = v_l(N(e)): the prime above
 * l is fixed by conjugation and has residue degree 1.
 */

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "prational/arith.hpp"

namespace prational {

// =============================================================================
// Fields
// =============================================================================

struct QuadField {
    i64 m = 0;     // squarefree radicand, != 0, 1
    i64 disc = 0;  // fundamental discriminant
    bool is_real = false;

    friend bool operator==(const QuadField&, const QuadField&) = default;
};

inline i64 fundamental_discriminant(i64 m) { return mod(m, 4) == 1 ? m : 4 * m; }

/// Field of the squarefree core of m0.
inline QuadField make_field(i64 m0) {
    if (m0 == 0) throw domain_error("make_field: radicand must be nonzero");
    i64 m = squarefree_core(m0);
    if (m == 1) throw domain_error("make_field: radicand is a perfect square");
    return {m, fundamental_discriminant(m), m > 0};
}

// =============================================================================
// Elements
// =============================================================================

class QuadElem {
public:
    QuadElem(QuadField field, mpz_class x, mpz_class y, int den = 1)
        : field_(field), x_(std::move(x)), y_(std::move(y)), den_(den) {
        if (den_ != 1 && den_ != 2 && den_ != 4)
            throw domain_error("QuadElem: denominator must be 1 or 2");
        normalize();
    }

    static QuadElem integer(QuadField field, i64 n) { return {field, mpz_class(n), 0, 1}; }
    static QuadElem sqrt_m(QuadField field) { return {field, 0, 1, 1}; }

    const QuadField& field() const { return field_; }
    const mpz_class& x() const { return x_; }
    const mpz_class& y() const { return y_; }
    int den() const { return den_; }
    bool is_zero() const { return x_ == 0 && y_ == 0; }

    mpz_class norm() const {
        mpz_class n = x_ * x_ - mpz_class(field_.m) * y_ * y_;
        return n / (den_ * den_);
    }
    mpz_class trace() const { return 2 * x_ / den_; }

    QuadElem conjugate() const { return {field_, x_, -y_, den_}; }

    friend QuadElem operator*(const QuadElem& a, const QuadElem& b) {
        a.require_same(b);
        mpz_class x = a.x_ * b.x_ + mpz_class(a.field_.m) * a.y_ * b.y_;
        mpz_class y = a.x_ * b.y_ + a.y_ * b.x_;
        return {a.field_, std::move(x), std::move(y), a.den_ * b.den_};
    }
    friend QuadElem operator+(const QuadElem& a, const QuadElem& b) {
        a.require_same(b);
        int den = std::max(a.den_, b.den_);
        return {a.field_, a.x_ * (den / a.den_) + b.x_ * (den / b.den_),
                a.y_ * (den / a.den_) + b.y_ * (den / b.den_), den};
    }
    friend QuadElem operator-(const QuadElem& a) { return {a.field_, -a.x_, -a.y_, a.den_}; }
    friend QuadElem operator-(const QuadElem& a, const QuadElem& b) { return a + (-b); }
    friend QuadElem operator-(const QuadElem& a, i64 n) { return a - integer(a.field_, n); }
    friend QuadElem operator+(const QuadElem& a, i64 n) { return a + integer(a.field_, n); }

    friend bool operator==(const QuadElem& a, const QuadElem& b) {
        return a.field_ == b.field_ && a.x_ == b.x_ && a.y_ == b.y_ && a.den_ == b.den_;
    }

    /// Inverse of a unit (|N| = 1).
    QuadElem unit_inverse() const {
        mpz_class n = norm();
        if (n == 1) return conjugate();
        if (n == -1) return -conjugate();
        throw domain_error("unit_inverse: element is not a unit");
    }

    /// "x + y*sqrt(m)" or "(x + y*sqrt(m))/2".
    std::string to_string() const {
        std::string body = x_.get_str();
        if (y_ != 0) {
            mpz_class ay = abs(y_);
            body += y_ < 0 ? " - " : " + ";
            if (ay != 1) body += ay.get_str() + "*";
            body += "sqrt(" + std::to_string(field_.m) + ")";
        }
        if (den_ == 1) return body;
        return "(" + body + ")/" + std::to_string(den_);
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadElem& e) {
        return os << e.to_string();
    }

private:
    void normalize() {
        while (den_ > 1 && mpz_even_p(x_.get_mpz_t()) && mpz_even_p(y_.get_mpz_t())) {
            x_ /= 2;
            y_ /= 2;
            den_ /= 2;
        }
        if (den_ == 4) throw domain_error("QuadElem: not an algebraic integer");
        if (den_ == 2 && (mod(field_.m, 4) != 1 || mpz_even_p(x_.get_mpz_t()) !=
                                                        mpz_even_p(y_.get_mpz_t())))
            throw domain_error("QuadElem: not an algebraic integer");
    }
    void require_same(const QuadElem& other) const {
        if (!(field_ == other.field_)) throw domain_error("QuadElem: mixed fields");
    }

    QuadField field_;
    mpz_class x_, y_;
    int den_;
};

struct NormTrace {
    mpz_class norm;
    mpz_class trace;
};

inline NormTrace norm_trace(const QuadElem& e) { return {e.norm(), e.trace()}; }

// =============================================================================
// Fundamental unit
// =============================================================================

struct FundUnit {
    QuadElem elem;
    int unit_norm;
    i64 cf_steps;  // number of partial quotients consumed
};

namespace detail {

/// Continued fraction of omega on the (P, Q) state; calls step(a) for every
/// partial quotient and returns (steps, norm) at the first period closure.
template <class Step>
std::pair<i64, int> omega_cf(i64 m, Step&& step) {
    if (m <= 1) throw domain_error("fundamental_unit: field must be real");
    const i64 r = static_cast<i64>(isqrt(static_cast<u64>(m)));
    const bool half = mod(m, 4) == 1;
    const i64 q0 = half ? 2 : 1;
    i64 p_state = half ? 1 : 0;
    i64 q_state = q0;
    for (i64 k = 0;; ++k) {
        i64 a = (p_state + r) / q_state;
        step(a);
        p_state = a * q_state - p_state;
        q_state = (m - p_state * p_state) / q_state;
        if (q_state == q0) return {k + 1, (k % 2 == 0) ? -1 : 1};
    }
}

}  // namespace detail

/// Minimal unit > 1 of the maximal order of a real quadratic field.
inline FundUnit fundamental_unit(const QuadField& field) {
    if (!field.is_real) throw domain_error("fundamental_unit: field must be real");
    mpz_class p_cur = 1, p_prev = 0, q_cur = 0, q_prev = 1;
    auto [steps, n] = detail::omega_cf(field.m, [&](i64 a) {
        mpz_class pn = p_cur * a + p_prev;
        mpz_class qn = q_cur * a + q_prev;
        p_prev = std::move(p_cur);
        q_prev = std::move(q_cur);
        p_cur = std::move(pn);
        q_cur = std::move(qn);
    });
    bool half = mod(field.m, 4) == 1;
    QuadElem e = half ? QuadElem(field, 2 * p_cur - q_cur, q_cur, 2)
                      : QuadElem(field, p_cur, q_cur, 1);
    return {std::move(e), n, steps};
}

/// Norm of the fundamental unit, without big-integer work.
inline int fundamental_unit_norm(const QuadField& field) {
    return detail::omega_cf(field.m, [](i64) {}).second;
}

/// epsilon = a + b*sqrt(m) modulo an odd modulus.
struct UnitResidue {
    i64 modulus;
    i64 a;
    i64 b;
};

struct ModularUnit {
    int unit_norm;
    i64 cf_steps;
    std::vector<UnitResidue> residues;

    const UnitResidue& at(i64 modulus) const {
        for (const auto& r : residues)
            if (r.modulus == modulus) return r;
        throw domain_error("ModularUnit: modulus not tracked");
    }
};

/// Fundamental unit reduced modulo each odd modulus (each < 2^62).
inline ModularUnit fundamental_unit_mod(const QuadField& field, std::span<const i64> moduli) {
    if (!field.is_real) throw domain_error("fundamental_unit_mod: field must be real");
    struct Conv {
        u64 m, p_cur = 1, p_prev = 0, q_cur = 0, q_prev = 1;
    };
    std::vector<Conv> conv;
    for (i64 md : moduli) {
        if (md < 3 || md % 2 == 0) throw domain_error("fundamental_unit_mod: modulus must be odd");
        conv.push_back({static_cast<u64>(md)});
    }
    auto [steps, n] = detail::omega_cf(field.m, [&](i64 a) {
        for (auto& c : conv) {
            u64 am = static_cast<u64>(a) % c.m;
            u64 pn = (mul_mod(c.p_cur, am, c.m) + c.p_prev) % c.m;
            u64 qn = (mul_mod(c.q_cur, am, c.m) + c.q_prev) % c.m;
            c.p_prev = c.p_cur;
            c.q_prev = c.q_cur;
            c.p_cur = pn;
            c.q_cur = qn;
        }
    });
    ModularUnit out{n, steps, {}};
    bool half = mod(field.m, 4) == 1;
    for (const auto& c : conv) {
        i64 md = static_cast<i64>(c.m);
        i64 p = static_cast<i64>(c.p_cur), q = static_cast<i64>(c.q_cur);
        if (!half) {
            out.residues.push_back({md, p, q});
        } else {
            // (2p - q + q sqrt m)/2 = p - q/2 + (q/2) sqrt m
            i64 half_q = mul_mod(static_cast<u64>(q), static_cast<u64>(inv_mod(2, md)), c.m);
            out.residues.push_back({md, mod(p - half_q, md), half_q});
        }
    }
    return out;
}

// =============================================================================
// Valuations at ramified primes
// =============================================================================

inline int mpz_valuation(const mpz_class& n, i64 ell) {
    if (n == 0) throw domain_error("valuation of zero");
    mpz_class t = n;
    mpz_class l = ell;
    return static_cast<int>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), l.get_mpz_t()));
}

/// v at the unique prime above a ramified odd ell.
inline int ramified_valuation(const QuadElem& e, i64 ell) {
    if (ell == 2) throw domain_error("ramified_valuation: ell must be odd");
    if (ell < 2 || e.field().disc % ell != 0)
        throw domain_error("ramified_valuation: ell does not divide the discriminant");
    if (e.is_zero()) throw domain_error("ramified_valuation: element is zero");
    return mpz_valuation(e.norm(), ell);
}

/// A valuation known exactly below a cap, or only as ">= cap".
struct CappedValuation {
    int value = 0;
    bool at_least = false;

    bool le(int bound) const { return !at_least && value <= bound; }
    std::string to_string() const {
        return at_least ? "≥" + std::to_string(value) : std::to_string(value);
    }
    static std::optional<CappedValuation> parse(const std::string& s) {
        const std::string ge = "≥";
        try {
            if (s.rfind(ge, 0) == 0) return CappedValuation{std::stoi(s.substr(ge.size())), true};
            std::size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) return std::nullopt;
            return CappedValuation{v, false};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    friend bool operator==(const CappedValuation&, const CappedValuation&) = default;
};

/// Valuation of an integer known modulo ell^cap.
inline CappedValuation capped_valuation(i64 residue, i64 ell, int cap) {
    i64 md = 1;
    for (int i = 0; i < cap; ++i) md *= ell;
    residue = mod(residue, md);
    if (residue == 0) return {cap, true};
    return {padic_valuation(residue, ell).v, false};
}

/// v_l(eps^2 - 1) at a ramified odd l from N(eps) and eps mod l^cap, using
/// N(eps -/+ 1) = N -/+ T + 1 and v(eps^2 - 1) = v(N(eps - 1)) + v(N(eps + 1)).
inline CappedValuation eps2_minus_1_valuation(int unit_norm, const UnitResidue& r, i64 ell,
                                              int cap) {
    i64 trace = mod(2 * r.a, r.modulus);
    auto lo = capped_valuation(unit_norm - trace + 1, ell, cap);
    auto hi = capped_valuation(unit_norm + trace + 1, ell, cap);
    int total = lo.value + hi.value;
    if (lo.at_least || hi.at_least || total >= cap) return {cap, true};
    return {total, false};
}

}  // namespace prational
