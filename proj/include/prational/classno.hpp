#pragma once

/**
 * @file classno.hpp
 * @brief Class numbers of quadratic fields from binary quadratic forms.
 *
 * Imaginary fields: count reduced positive definite forms.
 * Real fields: the narrow class number is the number of cycles of reduced
 * indefinite forms under the reduction operator rho; the wide class number
 * is h+ when N(eps) = -1 and h+/2 otherwise.
 */

#include <algorithm>
#include <string>
#include <vector>

#include "prational/arith.hpp"
#include "prational/quadratic.hpp"

namespace prational {

struct ImagForm {
    i64 a, b, c;
    friend bool operator==(const ImagForm&, const ImagForm&) = default;
};

struct IndefForm {
    i64 a, b, c;
    friend auto operator<=>(const IndefForm&, const IndefForm&) = default;
};

enum class ClassNumberMethod { enumeration, charsum, cycles };

inline std::string to_string(ClassNumberMethod m) {
    switch (m) {
        case ClassNumberMethod::enumeration: return "enumeration";
        case ClassNumberMethod::charsum: return "charsum";
        case ClassNumberMethod::cycles: return "cycles";
    }
    return "?";
}

struct ClassNumberResult {
    i64 disc = 0;
    i64 h = 0;
    i64 h_plus = 0;  // == h for imaginary fields
    ClassNumberMethod method = ClassNumberMethod::enumeration;

    /// p | h, which for odd p is the same as p | h+.
    bool divisible_by(i64 p) const { return h % p == 0; }
    friend bool operator==(const ClassNumberResult&, const ClassNumberResult&) = default;
};

inline bool is_fundamental_discriminant(i64 disc) {
    if (disc == 0 || disc == 1) return false;
    i64 r = mod(disc, 4);
    if (r == 1) return is_squarefree(disc);
    if (r != 0) return false;
    i64 m = disc / 4;
    i64 m4 = mod(m, 4);
    return (m4 == 2 || m4 == 3) && is_squarefree(m);
}

// =============================================================================
// Imaginary fields
// =============================================================================

/// Visit every reduced form of negative discriminant disc:
/// |b| <= a <= c, with b >= 0 when |b| = a or a = c.
template <class Visit>
void for_each_reduced_imag_form(i64 disc, Visit&& visit) {
    const i64 n = -disc;
    for (i64 a = 1; 3 * a * a <= n; ++a) {
        const i64 four_a = 4 * a;
        i64 b = -a + 1;
        if (mod(b - disc, 2) != 0) ++b;
        for (; b <= a; b += 2) {
            i64 num = b * b + n;
            if (num % four_a != 0) continue;
            i64 c = num / four_a;
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            visit(ImagForm{a, b, c});
        }
    }
}

inline ClassNumberResult h_imaginary(i64 disc) {
    if (disc >= 0 || !is_fundamental_discriminant(disc))
        throw domain_error("h_imaginary: not a negative fundamental discriminant");
    i64 h = 0;
    for_each_reduced_imag_form(disc, [&](const ImagForm&) { ++h; });
    return {disc, h, h, ClassNumberMethod::enumeration};
}

// =============================================================================
// Real fields
// =============================================================================

/// Reduced: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b.
inline bool is_reduced(const IndefForm& f, i64 disc) {
    const i64 s = static_cast<i64>(isqrt(static_cast<u64>(disc)));
    const i64 two_a = 2 * (f.a < 0 ? -f.a : f.a);
    return f.b >= 1 && f.b <= s && two_a + f.b > s && two_a - f.b <= s;
}

/// rho(a, b, c) = (c, b', (b'^2 - D)/4c) with b' = -b mod 2|c| and
/// sqrt(D) - 2|c| < b' < sqrt(D).
inline IndefForm rho(const IndefForm& f, i64 disc) {
    const i64 s = static_cast<i64>(isqrt(static_cast<u64>(disc)));
    const i64 two_c = 2 * (f.c < 0 ? -f.c : f.c);
    i64 bp = s - mod(s + f.b, two_c);
    return {f.c, bp, (bp * bp - disc) / (4 * f.c)};
}

inline std::vector<IndefForm> reduced_indef_forms(i64 disc) {
    const i64 s = static_cast<i64>(isqrt(static_cast<u64>(disc)));
    std::vector<IndefForm> forms;
    for (i64 b = s; b >= 1; --b) {
        if (mod(b - disc, 2) != 0) continue;
        const i64 n = (disc - b * b) / 4;  // = -a*c > 0
        // sqrt(D) - b < 2a < sqrt(D) + b
        const i64 a_lo = (s - b) / 2 + 1;
        const i64 a_hi = (s + b) / 2;
        for (i64 a = a_lo; a <= a_hi; ++a) {
            if (n % a != 0) continue;
            const i64 c = n / a;
            forms.push_back({a, b, -c});
            forms.push_back({-a, b, c});
        }
    }
    std::sort(forms.begin(), forms.end());
    return forms;
}

/// Number of rho-cycles among reduced forms = narrow class number.
inline i64 count_rho_cycles(i64 disc) {
    auto forms = reduced_indef_forms(disc);
    std::vector<char> seen(forms.size(), 0);
    auto index_of = [&](const IndefForm& f) {
        auto it = std::lower_bound(forms.begin(), forms.end(), f);
        if (it == forms.end() || !(*it == f))
            throw std::logic_error("rho left the set of reduced forms");
        return static_cast<std::size_t>(it - forms.begin());
    };
    i64 cycles = 0;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (seen[i]) continue;
        ++cycles;
        std::size_t j = i;
        while (!seen[j]) {
            seen[j] = 1;
            j = index_of(rho(forms[j], disc));
        }
    }
    return cycles;
}

inline ClassNumberResult h_plus_real(i64 disc) {
    if (disc <= 0 || is_square(disc) || !is_fundamental_discriminant(disc))
        throw domain_error("h_plus_real: not a positive fundamental discriminant");
    i64 h_plus = count_rho_cycles(disc);
    i64 m = mod(disc, 4) == 0 ? disc / 4 : disc;
    int n = fundamental_unit_norm(make_field(m));
    i64 h = n == -1 ? h_plus : h_plus / 2;
    return {disc, h, h_plus, ClassNumberMethod::cycles};
}

/// Dispatch by sign of the field's discriminant.
inline ClassNumberResult class_number(const QuadField& field) {
    return field.is_real ? h_plus_real(field.disc) : h_imaginary(field.disc);
}

}  // namespace prational
