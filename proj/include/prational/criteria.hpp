#pragma once

/**
 * @file criteria.hpp
 * @brief p-rationality of quadratic and biquadratic fields, and the freeness
 * certificate for K = Q(sqrt(pq), sqrt(-d)).
 *
 * Quadratic criteria (p >= 5):
 *  - imaginary: p-rational iff p does not divide h;
 *  - real: p-rational iff p does not divide h and the fundamental unit is
 *    not a p-th power in any completion above p.
 * A biquadratic field is p-rational iff its three quadratic subfields are
 * (p does not divide the degree 4).
 *
 * For the family, every unit check runs on the fundamental unit eps of
 * K+ = Q(sqrt(pq)): Z_p (x) E_K has rank one and the index of <eps^2> in
 * the relevant subgroup divides 4, which is prime to p.
 */

#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "prational/arith.hpp"
#include "prational/classno.hpp"
#include "prational/localfield.hpp"
#include "prational/quadratic.hpp"

namespace prational {

/// How the fundamental unit is obtained: exact coordinates, or residues only.
enum class UnitMode { exact, modular };

inline std::string to_string(UnitMode m) { return m == UnitMode::exact ? "exact" : "modular"; }

// =============================================================================
// p-rationality of quadratic and biquadratic fields
// =============================================================================

struct Check {
    std::string name;
    std::string value;
    bool passed;
};

struct PRationalityReport {
    i64 p = 0;
    std::vector<i64> radicands;
    std::vector<Check> checks;
    bool verdict = false;
};

struct QuadraticAssessment {
    QuadField field;
    ClassNumberResult h;
    SplitKind kind = SplitKind::inert;
    std::vector<bool> pth_power;  // per place above p; real fields only
    bool verdict = false;
};

namespace detail {

inline void require_prat_prime(i64 p) {
    if (p <= 3 || !is_prime(p)) throw domain_error("p must be a prime > 3");
}

inline ModSqrtElem unit_mod_p2(const QuadField& field, i64 p, UnitMode mode) {
    if (mode == UnitMode::exact) return reduce_mod_p2(fundamental_unit(field).elem, p);
    const i64 md = p * p;
    auto r = fundamental_unit_mod(field, std::span<const i64>(&md, 1)).at(md);
    return {r.a, r.b};
}

inline std::string field_label(i64 m) { return "Q(sqrt(" + std::to_string(m) + "))"; }

}  // namespace detail

inline QuadraticAssessment assess_quadratic(const QuadField& field, i64 p,
                                            UnitMode mode = UnitMode::exact) {
    detail::require_prat_prime(p);
    QuadraticAssessment out;
    out.field = field;
    out.h = class_number(field);
    out.verdict = !out.h.divisible_by(p);
    if (field.is_real) {
        LocalContext ctx = classify_splitting(field, p);
        out.kind = ctx.kind;
        out.pth_power = is_pth_power_local(detail::unit_mod_p2(field, p, mode), ctx);
        for (bool f : out.pth_power) out.verdict = out.verdict && !f;
    }
    return out;
}

inline void append_checks(const QuadraticAssessment& a, i64 p, std::vector<Check>& checks) {
    const std::string label = detail::field_label(a.field.m);
    checks.push_back({"h(" + label + ")", std::to_string(a.h.h), !a.h.divisible_by(p)});
    for (std::size_t i = 0; i < a.pth_power.size(); ++i) {
        std::string place = to_string(a.kind);
        if (a.pth_power.size() > 1) place += "#" + std::to_string(i + 1);
        checks.push_back({"unit of " + label + " is a p-th power at " + place,
                          a.pth_power[i] ? "true" : "false", !a.pth_power[i]});
    }
}

/// Q(sqrt(-d0)) with d0 > 0 squarefree.
inline PRationalityReport prat_imag(i64 d0, i64 p) {
    detail::require_prat_prime(p);
    if (d0 <= 0 || !is_squarefree(d0)) throw domain_error("d0 must be a positive squarefree integer");
    auto a = assess_quadratic(make_field(-d0), p);
    PRationalityReport r{p, {a.field.m}, {}, a.verdict};
    append_checks(a, p, r.checks);
    return r;
}

/// Q(sqrt(m)) with m > 1 squarefree.
inline PRationalityReport prat_real(i64 m, i64 p, UnitMode mode = UnitMode::exact) {
    detail::require_prat_prime(p);
    if (m <= 1 || !is_squarefree(m)) throw domain_error("m must be a squarefree integer > 1");
    auto a = assess_quadratic(make_field(m), p, mode);
    PRationalityReport r{p, {a.field.m}, {}, a.verdict};
    append_checks(a, p, r.checks);
    return r;
}

/// Radicands of the three quadratic subfields of Q(sqrt m1, sqrt m2).
inline std::array<i64, 3> biquadratic_radicands(i64 m1, i64 m2) {
    if (m1 == 0 || m2 == 0) throw domain_error("radicands must be nonzero");
    i64 c1 = squarefree_core(m1), c2 = squarefree_core(m2);
    if (c1 == 1 || c2 == 1 || c1 == c2)
        throw domain_error("Q(sqrt m1, sqrt m2) is not biquadratic");
    i64 g = std::gcd(c1 < 0 ? -c1 : c1, c2 < 0 ? -c2 : c2);
    i128 c3 = static_cast<i128>(c1 / g) * (c2 / g);
    if (c3 > INT64_MAX || c3 < INT64_MIN) throw domain_error("radicand product overflows");
    return {c1, c2, static_cast<i64>(c3)};
}

inline PRationalityReport prat_biquad(i64 m1, i64 m2, i64 p, UnitMode mode = UnitMode::exact) {
    detail::require_prat_prime(p);
    auto rad = biquadratic_radicands(m1, m2);
    PRationalityReport r{p, {rad.begin(), rad.end()}, {}, true};
    for (i64 m : rad) {
        auto a = assess_quadratic(make_field(m), p, mode);
        append_checks(a, p, r.checks);
        r.verdict = r.verdict && a.verdict;
    }
    return r;
}

// =============================================================================
// The family K = Q(sqrt(pq), sqrt(-d))
// =============================================================================

struct FamilyParams {
    i64 p = 0, q = 0, d = 0;
    friend bool operator==(const FamilyParams&, const FamilyParams&) = default;
};

struct FamilyValidation {
    std::optional<FamilyParams> params;
    std::vector<std::string> reasons;
    bool ok() const { return params.has_value(); }
};

/// Every failed condition is reported, not just the first.
inline FamilyValidation validate_family(i64 p, i64 q, i64 d) {
    FamilyValidation out;
    auto& why = out.reasons;
    const bool p_ok = p > 3 && is_prime(p);
    const bool q_ok = q > 2 && is_prime(q);
    const bool d_ok = d > 0 && is_squarefree(d);
    if (!p_ok) why.push_back("p must be a prime > 3");
    if (!q_ok) why.push_back("q must be an odd prime");
    if (!d_ok) why.push_back("d must be a positive squarefree integer");
    if (p_ok && q_ok) {
        if (p == q) why.push_back("q must differ from p");
        else if (mod(q, p) != p - 1) why.push_back("q must be congruent to -1 mod p");
    }
    if (d_ok && p_ok && d % p == 0) why.push_back("p must not divide d");
    if (d_ok && q_ok && d % q == 0) why.push_back("q must not divide d");
    if (d_ok && p_ok && d % p != 0 && kronecker(-d, p) != -1)
        why.push_back("-d must be a quadratic non-residue mod p");
    if (d_ok && q_ok && d % q != 0 && kronecker(-d, q) != -1)
        why.push_back("-d must be a quadratic non-residue mod q");
    if (why.empty()) out.params = FamilyParams{p, q, d};
    return out;
}

/// Residue degree of p and of q in K: both ramify in K+ and are inert in
/// K/K+ because -d is a non-residue.
inline constexpr int family_residue_degree = 2;
/// K is biquadratic and mu_p generates a cyclic extension of degree p-1 >= 4
/// (for p = 5 that extension is cyclic quartic, so not inside K).
inline constexpr bool family_contains_mu_p = false;
inline constexpr int family_rank = 2;

/// What the certificate needs to know about eps.
struct UnitSnapshot {
    int unit_norm = 0;
    i64 cf_steps = 0;
    std::optional<QuadElem> exact;
    ModSqrtElem mod_p2;
    CappedValuation v_p;  // v_P(eps^2 - 1)
    CappedValuation v_q;  // v_Q(eps^2 - 1)
    i64 residue_mod_q = 0;  // eps mod the prime above q, an element of F_q
};

inline UnitSnapshot unit_snapshot(const FamilyParams& fp, UnitMode mode) {
    const QuadField kplus = make_field(fp.p * fp.q);
    UnitSnapshot s;
    if (mode == UnitMode::exact) {
        FundUnit u = fundamental_unit(kplus);
        s.unit_norm = u.unit_norm;
        s.cf_steps = u.cf_steps;
        QuadElem e2m1 = u.elem * u.elem - 1;
        s.v_p = {ramified_valuation(e2m1, fp.p), false};
        s.v_q = {ramified_valuation(e2m1, fp.q), false};
        s.mod_p2 = reduce_mod_p2(u.elem, fp.p);
        mpz_class x = u.elem.x() % fp.q;
        i64 xq = mod(x.get_si(), fp.q);
        s.residue_mod_q = u.elem.den() == 2 ? mul_mod(xq, inv_mod(2, fp.q), fp.q) : xq;
        s.exact = std::move(u.elem);
    } else {
        const i64 p3 = fp.p * fp.p * fp.p, q3 = fp.q * fp.q * fp.q;
        const i64 moduli[] = {p3, q3};
        ModularUnit u = fundamental_unit_mod(kplus, moduli);
        s.unit_norm = u.unit_norm;
        s.cf_steps = u.cf_steps;
        const auto& rp = u.at(p3);
        const auto& rq = u.at(q3);
        s.v_p = eps2_minus_1_valuation(u.unit_norm, rp, fp.p, 3);
        s.v_q = eps2_minus_1_valuation(u.unit_norm, rq, fp.q, 3);
        const i64 p2 = fp.p * fp.p;
        s.mod_p2 = {mod(rp.a, p2), mod(rp.b, p2)};
        s.residue_mod_q = mod(rq.a, fp.q);
    }
    return s;
}

struct DirectSummand {
    bool e_s_generated = false;
    CappedValuation v_p_val;
    CappedValuation v_q_val;
    bool primitive = false;
};

/// E_S is generated by eps^2 once eps^2 is trivial in the pro-p part of the
/// residue group at q: eps mod q lies in F_q and p does not divide q - 1.
/// The generator stays out of p * U^1 at p when v_P(eps^2 - 1) <= 2.
inline DirectSummand direct_summand_check(const FamilyParams& fp, const UnitSnapshot& u) {
    DirectSummand out;
    out.v_p_val = u.v_p;
    out.v_q_val = u.v_q;
    i64 eps2 = mul_mod(u.residue_mod_q, u.residue_mod_q, fp.q);
    out.e_s_generated = mult_order(eps2, fp.q) % fp.p != 0;
    out.primitive = u.v_p.le(2);
    return out;
}

/// alpha_v = 1 iff mu_p is absent from K+_v (p does not divide q - 1) but
/// present in K_v (p | q^2 - 1); S(K+) is the single prime above q.
inline i64 alpha_S(const FamilyParams& fp) {
    bool absent_in_kplus = !mu_p_in_local(fp.q, fp.p);
    bool present_in_k = mu_p_in_local(fp.q * fp.q, fp.p);
    return absent_in_kplus && present_in_k ? 1 : 0;
}

enum class Verdict { certified_free, not_certified };

inline std::string to_string(Verdict v) {
    return v == Verdict::certified_free ? "certified_free" : "not_certified";
}

struct FreenessFacts {
    ClassNumberResult h_kplus, h_l1, h_l2;
    int unit_norm = 0;
    std::optional<QuadElem> unit;
    i64 cf_steps = 0;
    bool unit_pth_power_at_p = false;
    bool p_rational = false;
    CappedValuation v_p_val, v_q_val;
    bool e_s_generated = false;
    bool primitive = false;
    i64 s = 0;     // places of K_infinity above q
    i64 s_mu = 0;  // those whose completion contains mu_p
    bool mu_p_in_kq = false;
    i64 alpha_s = 0;
    bool mu_p_in_k = false;
    bool table_witness = false;
};

struct FreenessReport {
    FamilyParams params;
    UnitMode mode = UnitMode::exact;
    std::optional<FreenessFacts> facts;  // absent when the family check fails
    Verdict verdict = Verdict::not_certified;
    std::optional<int> rank;
    std::vector<std::string> reasons;
};

/// Reasons a set of facts falls short of the freeness hypotheses.
inline std::vector<std::string> failing_conditions(const FreenessFacts& f, i64 p) {
    std::vector<std::string> why;
    if (f.h_kplus.divisible_by(p)) why.push_back("p divides h(K+)");
    if (f.h_l1.divisible_by(p)) why.push_back("p divides h(L1)");
    if (f.h_l2.divisible_by(p)) why.push_back("p divides h(L2)");
    if (f.unit_pth_power_at_p) why.push_back("eps is a p-th power at p");
    if (f.s != 1) why.push_back("s=" + std::to_string(f.s));
    if (f.s != f.s_mu) why.push_back("s count disagrees with the mu_p place count");
    if (!f.e_s_generated) why.push_back("E_S not generated by eps^2");
    if (!f.primitive) why.push_back("v_p(eps^2-1)=" + f.v_p_val.to_string() + " > 2");
    if (f.mu_p_in_k) why.push_back("K contains mu_p");
    return why;
}

inline FreenessReport certify_freeness(i64 p, i64 q, i64 d, UnitMode mode = UnitMode::exact) {
    FreenessReport report;
    report.params = {p, q, d};
    report.mode = mode;
    FamilyValidation v = validate_family(p, q, d);
    if (!v.ok()) {
        report.reasons = std::move(v.reasons);
        return report;
    }
    const FamilyParams& fp = *v.params;

    // subfields K+ = Q(sqrt(pq)), L1 = Q(sqrt(-dpq)), L2 = Q(sqrt(-d));
    // the imaginary class numbers dominate the cost and come first
    auto rad = biquadratic_radicands(p * q, -d);
    FreenessFacts f;
    f.h_l1 = h_imaginary(make_field(rad[2]).disc);
    f.h_l2 = h_imaginary(make_field(rad[1]).disc);
    f.h_kplus = h_plus_real(make_field(rad[0]).disc);

    UnitSnapshot u = unit_snapshot(fp, mode);
    f.unit_norm = u.unit_norm;
    f.cf_steps = u.cf_steps;
    f.unit = u.exact;
    LocalContext ctx = classify_splitting(make_field(rad[0]), p);
    f.unit_pth_power_at_p = is_pth_power_local(u.mod_p2, ctx).front();
    f.p_rational = !f.h_kplus.divisible_by(p) && !f.h_l1.divisible_by(p) &&
                   !f.h_l2.divisible_by(p) && !f.unit_pth_power_at_p;

    DirectSummand ds = direct_summand_check(fp, u);
    f.v_p_val = ds.v_p_val;
    f.v_q_val = ds.v_q_val;
    f.e_s_generated = ds.e_s_generated;
    f.primitive = ds.primitive;

    f.s = tower_places(q, family_residue_degree, p);
    f.mu_p_in_kq = mu_p_in_local(q * q, p);
    f.s_mu = f.mu_p_in_kq ? f.s : 0;
    f.alpha_s = alpha_S(fp);
    f.mu_p_in_k = family_contains_mu_p;
    f.table_witness = f.p_rational && f.v_p_val == CappedValuation{1, false} &&
                      f.v_q_val == CappedValuation{1, false};

    report.reasons = failing_conditions(f, p);
    if (report.reasons.empty()) {
        report.verdict = Verdict::certified_free;
        report.rank = family_rank;
    }
    report.facts = std::move(f);
    return report;
}

/// Which reports make it into a scan row.
///  certified: every hypothesis of the freeness theorem holds (s = 1 included);
///  witness:   K is p-rational and v_P(eps^2-1) = v_Q(eps^2-1) = 1, the
///             verification recipe of the worked example (s is reported,
///             not gated).
enum class RowRule { certified, witness };

inline std::string to_string(RowRule r) { return r == RowRule::certified ? "certified" : "witness"; }

inline std::optional<RowRule> parse_row_rule(const std::string& s) {
    if (s == "certified") return RowRule::certified;
    if (s == "witness") return RowRule::witness;
    return std::nullopt;
}

}  // namespace prational
