#pragma once

/**
 * @file report.hpp
 * @brief JSON, text and CSV renderings of certificates and verdicts.
 *
 * The JSON layout is versioned by schema_version; see docs/json-schema.md.
 * Text and CSV renderings are generated from the same ordered fact list
 * as the JSON facts object, so the three formats carry identical facts.
 */

#include "json.hpp"

#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prational/criteria.hpp"

namespace prational {

using json = nlohmann::json;

inline constexpr int schema_version = 1;
inline constexpr const char* tool_version = "0.1.0";

enum class OutputFormat { text, json, csv };

inline std::optional<OutputFormat> parse_format(const std::string& s) {
    if (s == "text") return OutputFormat::text;
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    return std::nullopt;
}

// =============================================================================
// Valuations and elements
// =============================================================================

inline json to_json_value(const CappedValuation& v) {
    if (v.at_least) return v.to_string();
    return v.value;
}

inline CappedValuation capped_from_json(const json& j) {
    if (j.is_number_integer()) return {j.get<int>(), false};
    if (j.is_string()) {
        if (auto v = CappedValuation::parse(j.get<std::string>())) return *v;
    }
    throw domain_error("malformed valuation: " + j.dump());
}

inline json to_json_value(const QuadElem& e) {
    return {{"m", e.field().m}, {"x", e.x().get_str()}, {"y", e.y().get_str()}, {"den", e.den()}};
}

inline QuadElem quad_elem_from_json(const json& j) {
    QuadField f = make_field(j.at("m").get<i64>());
    return {f, mpz_class(j.at("x").get<std::string>()), mpz_class(j.at("y").get<std::string>()),
            j.at("den").get<int>()};
}

// =============================================================================
// Freeness report
// =============================================================================

inline json facts_to_json(const FreenessFacts& f) {
    json j;
    j["disc_K+"] = f.h_kplus.disc;
    j["h_K+"] = f.h_kplus.h;
    j["h_plus_K+"] = f.h_kplus.h_plus;
    j["disc_L1"] = f.h_l1.disc;
    j["h_L1"] = f.h_l1.h;
    j["disc_L2"] = f.h_l2.disc;
    j["h_L2"] = f.h_l2.h;
    j["unit"] = f.unit ? to_json_value(*f.unit) : json(nullptr);
    j["unit_norm"] = f.unit_norm;
    j["cf_steps"] = f.cf_steps;
    j["unit_pth_power_at_p"] = f.unit_pth_power_at_p;
    j["p_rational"] = f.p_rational;
    j["v_p_val"] = to_json_value(f.v_p_val);
    j["v_q_val"] = to_json_value(f.v_q_val);
    j["e_s_generated"] = f.e_s_generated;
    j["primitive"] = f.primitive;
    j["s"] = f.s;
    j["s_mu"] = f.s_mu;
    j["mu_p_in_Kq"] = f.mu_p_in_kq;
    j["alpha_S"] = f.alpha_s;
    j["mu_p_in_K"] = f.mu_p_in_k;
    j["table_witness"] = f.table_witness;
    return j;
}

inline FreenessFacts facts_from_json(const json& j) {
    FreenessFacts f;
    f.h_kplus = {j.at("disc_K+").get<i64>(), j.at("h_K+").get<i64>(), j.at("h_plus_K+").get<i64>(),
                 ClassNumberMethod::cycles};
    i64 h1 = j.at("h_L1").get<i64>(), h2 = j.at("h_L2").get<i64>();
    f.h_l1 = {j.at("disc_L1").get<i64>(), h1, h1, ClassNumberMethod::enumeration};
    f.h_l2 = {j.at("disc_L2").get<i64>(), h2, h2, ClassNumberMethod::enumeration};
    if (!j.at("unit").is_null()) f.unit = quad_elem_from_json(j.at("unit"));
    f.unit_norm = j.at("unit_norm").get<int>();
    f.cf_steps = j.at("cf_steps").get<i64>();
    f.unit_pth_power_at_p = j.at("unit_pth_power_at_p").get<bool>();
    f.p_rational = j.at("p_rational").get<bool>();
    f.v_p_val = capped_from_json(j.at("v_p_val"));
    f.v_q_val = capped_from_json(j.at("v_q_val"));
    f.e_s_generated = j.at("e_s_generated").get<bool>();
    f.primitive = j.at("primitive").get<bool>();
    f.s = j.at("s").get<i64>();
    f.s_mu = j.at("s_mu").get<i64>();
    f.mu_p_in_kq = j.at("mu_p_in_Kq").get<bool>();
    f.alpha_s = j.at("alpha_S").get<i64>();
    f.mu_p_in_k = j.at("mu_p_in_K").get<bool>();
    f.table_witness = j.at("table_witness").get<bool>();
    return f;
}

inline json to_json(const FreenessReport& r) {
    json j;
    j["schema_version"] = schema_version;
    j["p"] = r.params.p;
    j["q"] = r.params.q;
    j["d"] = r.params.d;
    j["mode"] = to_string(r.mode);
    j["verdict"] = to_string(r.verdict);
    j["rank"] = r.rank ? json(*r.rank) : json(nullptr);
    j["reasons"] = r.reasons;
    j["facts"] = r.facts ? facts_to_json(*r.facts) : json(nullptr);
    return j;
}

inline UnitMode parse_mode(const std::string& s) {
    if (s == "exact") return UnitMode::exact;
    if (s == "modular") return UnitMode::modular;
    throw domain_error("unknown unit mode: " + s);
}

inline Verdict parse_verdict(const std::string& s) {
    if (s == "certified_free") return Verdict::certified_free;
    if (s == "not_certified") return Verdict::not_certified;
    throw domain_error("unknown verdict: " + s);
}

inline FreenessReport report_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != schema_version)
        throw domain_error("unsupported schema_version");
    FreenessReport r;
    r.params = {j.at("p").get<i64>(), j.at("q").get<i64>(), j.at("d").get<i64>()};
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!j.at("rank").is_null()) r.rank = j.at("rank").get<int>();
    r.reasons = j.at("reasons").get<std::vector<std::string>>();
    if (!j.at("facts").is_null()) r.facts = facts_from_json(j.at("facts"));
    return r;
}

/// (name, display value) for every fact, in the JSON key order.
inline std::vector<std::pair<std::string, std::string>> fact_list(const FreenessFacts& f) {
    std::vector<std::pair<std::string, std::string>> out;
    json j = facts_to_json(f);
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string value;
        if (it.key() == "unit")
            value = f.unit ? f.unit->to_string() : "n/a";
        else if (it.value().is_string())
            value = it.value().get<std::string>();
        else
            value = it.value().dump();
        out.emplace_back(it.key(), value);
    }
    return out;
}

/// Consistency of a report with its own facts; empty when consistent.
inline std::vector<std::string> validate_report(const FreenessReport& r) {
    std::vector<std::string> bad;
    const bool certified = r.verdict == Verdict::certified_free;
    if (certified != r.rank.has_value()) bad.push_back("rank present iff certified");
    if (r.rank && *r.rank != family_rank) bad.push_back("rank must be 2");
    auto v = validate_family(r.params.p, r.params.q, r.params.d);
    if (!r.facts) {
        if (certified) bad.push_back("certified without facts");
        if (v.ok()) bad.push_back("valid family without facts");
        return bad;
    }
    if (!v.ok()) bad.push_back("facts for an invalid family");
    const auto& f = *r.facts;
    const i64 p = r.params.p, q = r.params.q;
    auto expected = failing_conditions(f, p);
    if (expected.empty() != certified) bad.push_back("verdict does not follow from facts");
    if (expected != r.reasons) bad.push_back("reasons do not follow from facts");
    bool prat = !f.h_kplus.divisible_by(p) && !f.h_l1.divisible_by(p) &&
                !f.h_l2.divisible_by(p) && !f.unit_pth_power_at_p;
    if (prat != f.p_rational) bad.push_back("p_rational does not follow from facts");
    bool witness = f.p_rational && f.v_p_val == CappedValuation{1, false} &&
                   f.v_q_val == CappedValuation{1, false};
    if (witness != f.table_witness) bad.push_back("table_witness does not follow from facts");
    if (f.primitive != f.v_p_val.le(2)) bad.push_back("primitive does not follow from v_p_val");
    if (f.h_kplus.h_plus != f.h_kplus.h && f.h_kplus.h_plus != 2 * f.h_kplus.h)
        bad.push_back("h+ must be h or 2h");
    if (f.alpha_s != 1) bad.push_back("alpha_S must be 1 inside the family");
    if (!f.mu_p_in_kq) bad.push_back("mu_p must lie in K_q inside the family");
    if (f.s != f.s_mu) bad.push_back("s and the mu_p count disagree");
    if (certified) {
        if (mod(q, p) != p - 1) bad.push_back("certified q not -1 mod p");
        if (mod(q, p * p) == p * p - 1) bad.push_back("certified q is -1 mod p^2");
        if (kronecker(-r.params.d, q) != -1) bad.push_back("certified -d is a residue mod q");
    }
    return bad;
}

inline void render_text(std::ostream& os, const FreenessReport& r, bool color = false) {
    const char* on = "";
    const char* off = "";
    if (color) {
        on = r.verdict == Verdict::certified_free ? "\x1b[32m" : "\x1b[33m";
        off = "\x1b[0m";
    }
    os << "K = Q(sqrt(" << r.params.p * r.params.q << "), sqrt(-" << r.params.d << "))  p="
       << r.params.p << " q=" << r.params.q << " d=" << r.params.d << "\n";
    os << "verdict: " << on << to_string(r.verdict) << off << "\n";
    os << "rank: " << (r.rank ? std::to_string(*r.rank) : "n/a") << "\n";
    os << "mode: " << to_string(r.mode) << "\n";
    if (r.facts)
        for (const auto& [k, v] : fact_list(*r.facts)) os << k << ": " << v << "\n";
    for (const auto& why : r.reasons) os << "reason: " << why << "\n";
}

inline void render_csv(std::ostream& os, const FreenessReport& r) {
    os << "p,q,d,verdict,rank";
    std::vector<std::pair<std::string, std::string>> facts;
    if (r.facts) facts = fact_list(*r.facts);
    for (const auto& kv : facts) os << "," << kv.first;
    os << ",reasons\n";
    os << r.params.p << "," << r.params.q << "," << r.params.d << "," << to_string(r.verdict)
       << "," << (r.rank ? std::to_string(*r.rank) : "");
    for (const auto& kv : facts) os << ",\"" << kv.second << "\"";
    os << ",\"";
    for (std::size_t i = 0; i < r.reasons.size(); ++i) os << (i ? "; " : "") << r.reasons[i];
    os << "\"\n";
}

// =============================================================================
// Quadratic-field utilities
// =============================================================================

inline json to_json(const FundUnit& u) {
    return {{"m", u.elem.field().m},    {"unit", u.elem.to_string()}, {"x", u.elem.x().get_str()},
            {"y", u.elem.y().get_str()}, {"den", u.elem.den()},        {"norm", u.unit_norm},
            {"cf_steps", u.cf_steps}};
}

inline std::string describe(const FundUnit& u) {
    return u.elem.to_string() + ", norm " + (u.unit_norm > 0 ? "+1" : "-1");
}

inline json to_json(const ClassNumberResult& c) {
    return {{"disc", c.disc}, {"h", c.h}, {"h_plus", c.h_plus}, {"method", to_string(c.method)}};
}

inline json to_json(const PRationalityReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"value", c.value}, {"passed", c.passed}});
    return {{"p", r.p}, {"radicands", r.radicands}, {"checks", checks}, {"verdict", r.verdict}};
}

}  // namespace prational
