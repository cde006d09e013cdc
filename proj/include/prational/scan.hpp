#pragma once

/**
 * @file scan.hpp
 * @brief Sweeps over q for fixed (p, d), table reproduction, and the
 * append-only JSON-lines cache that makes sweeps resumable.
 *
 * Candidates are evaluated concurrently; results are merged by q so the
 * output never depends on the worker count or on which candidates came
 * from the cache. Cache appends go through a single mutex-guarded writer.
 */

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "prational/criteria.hpp"
#include "prational/report.hpp"

namespace prational {

// =============================================================================
// Records
// =============================================================================

struct ScanRecord {
    int schema = schema_version;
    i64 p = 0, q = 0, d = 0;
    std::string verdict;
    std::optional<int> rank;
    json facts = json::object();
    std::string tool = tool_version;
    json extra = json::object();  // unknown fields, kept verbatim

    friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

inline ScanRecord record_from_report(const FreenessReport& r) {
    ScanRecord rec;
    rec.p = r.params.p;
    rec.q = r.params.q;
    rec.d = r.params.d;
    rec.verdict = to_string(r.verdict);
    rec.rank = r.rank;
    rec.facts = r.facts ? facts_to_json(*r.facts) : json::object();
    rec.facts["reasons"] = r.reasons;
    rec.facts["mode"] = to_string(r.mode);
    return rec;
}

/// Rebuild the report a record was made from; throws on malformed facts.
inline FreenessReport report_from_record(const ScanRecord& rec) {
    FreenessReport r;
    r.params = {rec.p, rec.q, rec.d};
    r.mode = parse_mode(rec.facts.at("mode").get<std::string>());
    r.verdict = parse_verdict(rec.verdict);
    r.rank = rec.rank;
    r.reasons = rec.facts.at("reasons").get<std::vector<std::string>>();
    if (rec.facts.contains("p_rational")) r.facts = facts_from_json(rec.facts);
    return r;
}

inline json to_json(const ScanRecord& rec) {
    json j = rec.extra;
    j["schema_version"] = rec.schema;
    j["p"] = rec.p;
    j["q"] = rec.q;
    j["d"] = rec.d;
    j["verdict"] = rec.verdict;
    j["rank"] = rec.rank ? json(*rec.rank) : json(nullptr);
    j["facts"] = rec.facts;
    j["tool_version"] = rec.tool;
    return j;
}

inline ScanRecord record_from_json(const json& j) {
    if (!j.is_object()) throw domain_error("record is not a JSON object");
    ScanRecord rec;
    rec.schema = j.at("schema_version").get<int>();
    rec.p = j.at("p").get<i64>();
    rec.q = j.at("q").get<i64>();
    rec.d = j.at("d").get<i64>();
    rec.verdict = j.at("verdict").get<std::string>();
    if (!j.at("rank").is_null()) rec.rank = j.at("rank").get<int>();
    rec.facts = j.at("facts");
    if (!rec.facts.is_object()) throw domain_error("facts is not an object");
    rec.tool = j.at("tool_version").get<std::string>();
    static const char* known[] = {"schema_version", "p",     "q",           "d",
                                  "verdict",        "rank",  "facts",       "tool_version"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            rec.extra[it.key()] = it.value();
    return rec;
}

/// Does a record belong in a row under the given rule? Uses stored facts only.
inline bool row_member(const ScanRecord& rec, RowRule rule) {
    if (rule == RowRule::certified) return rec.verdict == "certified_free";
    return rec.facts.value("table_witness", false);
}

// =============================================================================
// Cache
// =============================================================================

struct CacheContents {
    std::map<std::tuple<i64, i64, i64>, ScanRecord> records;  // keyed by (p, q, d)
    std::vector<std::string> diagnostics;
};

/// Read every line; malformed or self-inconsistent records are reported and skipped.
inline CacheContents load_cache(const std::filesystem::path& path) {
    CacheContents out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        try {
            ScanRecord rec = record_from_json(json::parse(line));
            auto problems = validate_report(report_from_record(rec));
            if (!problems.empty())
                throw domain_error("inconsistent record: " + problems.front());
            out.records[{rec.p, rec.q, rec.d}] = std::move(rec);
        } catch (const std::exception& e) {
            out.diagnostics.push_back(path.string() + ":" + std::to_string(n) + ": skipped (" +
                                      e.what() + ")");
        }
    }
    return out;
}

class CacheWriter {
public:
    explicit CacheWriter(const std::filesystem::path& path) {
        // a torn final line from an interrupted run must not swallow the next record
        bool needs_newline = false;
        if (std::ifstream probe{path, std::ios::binary | std::ios::ate}; probe && probe.tellg() > 0) {
            probe.seekg(-1, std::ios::end);
            needs_newline = probe.get() != '\n';
        }
        out_.open(path, std::ios::app);
        if (!out_) throw std::runtime_error("cannot open cache file " + path.string());
        if (needs_newline) out_ << '\n';
    }

    void append(const ScanRecord& rec) {
        std::lock_guard lock(mu_);
        out_ << to_json(rec).dump() << '\n';
        out_.flush();
    }

private:
    std::mutex mu_;
    std::ofstream out_;
};

// =============================================================================
// Scans
// =============================================================================

struct ScanOptions {
    i64 p = 0;
    i64 d = 0;
    i64 q_max = 0;
    int jobs = 1;
    std::optional<std::filesystem::path> cache;
    UnitMode mode = UnitMode::modular;
    RowRule rule = RowRule::certified;
};

struct ScanResult {
    i64 p = 0, d = 0, q_max = 0;
    RowRule rule = RowRule::certified;
    std::vector<i64> row;
    std::vector<ScanRecord> records;  // one per candidate, ascending q
    std::vector<std::string> diagnostics;
    std::size_t reused = 0;
    std::size_t computed = 0;
};

/// Primes q <= q_max with q = -1 (mod p).
inline std::vector<i64> scan_candidates(i64 p, i64 q_max) {
    std::vector<i64> out;
    for (i64 q = p - 1; q <= q_max; q += p)
        if (q > 2 && q != p && is_prime(q)) out.push_back(q);
    return out;
}

inline ScanResult scan_q(const ScanOptions& opt) {
    if (opt.p <= 3 || !is_prime(opt.p)) throw domain_error("p must be a prime > 3");
    if (opt.d <= 0) throw domain_error("d must be positive");
    if (opt.jobs < 1) throw domain_error("jobs must be >= 1");

    ScanResult res;
    res.p = opt.p;
    res.d = opt.d;
    res.q_max = opt.q_max;
    res.rule = opt.rule;

    const auto candidates = scan_candidates(opt.p, opt.q_max);
    std::vector<std::optional<ScanRecord>> slots(candidates.size());

    std::optional<CacheWriter> writer;
    if (opt.cache) {
        CacheContents cached = load_cache(*opt.cache);
        res.diagnostics = std::move(cached.diagnostics);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            auto it = cached.records.find({opt.p, candidates[i], opt.d});
            if (it == cached.records.end()) continue;
            const ScanRecord& rec = it->second;
            if (rec.schema != schema_version || rec.tool != tool_version) continue;
            if (rec.facts.value("mode", "") != to_string(opt.mode)) continue;
            slots[i] = rec;
            ++res.reused;
        }
        writer.emplace(*opt.cache);
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (!slots[i]) todo.push_back(i);
    res.computed = todo.size();

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) {
            const std::size_t i = todo[k];
            try {
                ScanRecord rec =
                    record_from_report(certify_freeness(opt.p, candidates[i], opt.d, opt.mode));
                if (writer) writer->append(rec);
                slots[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const int n = std::max(1, std::min<int>(opt.jobs, static_cast<int>(todo.size())));
        for (int t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& slot : slots) {
        if (row_member(*slot, opt.rule)) res.row.push_back(slot->q);
        res.records.push_back(std::move(*slot));
    }
    return res;
}

/// Post-hoc check over a scan: every record consistent, every row entry in the family.
inline std::vector<std::string> validate_scan(const ScanResult& res) {
    std::vector<std::string> bad;
    for (const auto& rec : res.records) {
        try {
            for (const auto& msg : validate_report(report_from_record(rec)))
                bad.push_back("q=" + std::to_string(rec.q) + ": " + msg);
        } catch (const std::exception& e) {
            bad.push_back("q=" + std::to_string(rec.q) + ": " + e.what());
        }
    }
    const i64 p = res.p;
    for (i64 q : res.row) {
        if (mod(q, p) != p - 1) bad.push_back("row q=" + std::to_string(q) + " not -1 mod p");
        if (kronecker(-res.d, q) != -1)
            bad.push_back("row q=" + std::to_string(q) + ": -d is a residue mod q");
        if (res.rule == RowRule::certified && mod(q, p * p) == p * p - 1)
            bad.push_back("row q=" + std::to_string(q) + " is -1 mod p^2");
    }
    return bad;
}

// =============================================================================
// Tables
// =============================================================================

struct TableRow {
    i64 p = 0;
    std::vector<i64> qs;
    std::optional<std::string> error;
};

struct Table {
    i64 d = 0;
    i64 q_max = 0;
    RowRule rule = RowRule::certified;
    std::vector<TableRow> rows;
};

/// One scan per p; a failing row records its error and the others proceed.
inline Table reproduce_table(const std::vector<i64>& p_list, i64 q_max, i64 d, int jobs = 1,
                             RowRule rule = RowRule::certified,
                             UnitMode mode = UnitMode::modular) {
    Table t{d, q_max, rule, {}};
    for (i64 p : p_list) {
        TableRow row{p, {}, std::nullopt};
        try {
            ScanOptions opt;
            opt.p = p;
            opt.d = d;
            opt.q_max = q_max;
            opt.jobs = jobs;
            opt.mode = mode;
            opt.rule = rule;
            row.qs = scan_q(opt).row;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// =============================================================================
// Rendering
// =============================================================================

inline json to_json(const ScanResult& r) {
    json records = json::array();
    for (const auto& rec : r.records) records.push_back(to_json(rec));
    return {{"p", r.p},     {"d", r.d},           {"q_max", r.q_max}, {"rule", to_string(r.rule)},
            {"row", r.row}, {"records", records}};
}

inline void render(std::ostream& os, const ScanResult& r, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json:
            os << to_json(r).dump(2) << "\n";
            break;
        case OutputFormat::csv:
            os << "q,verdict,rank,table_witness,s,v_p_val,v_q_val,h_K+,h_L1,h_L2,in_row\n";
            for (const auto& rec : r.records) {
                auto fact = [&](const char* key) -> std::string {
                    if (!rec.facts.contains(key)) return "";
                    const json& v = rec.facts.at(key);
                    return v.is_string() ? v.get<std::string>() : v.dump();
                };
                os << rec.q << "," << rec.verdict << "," << (rec.rank ? std::to_string(*rec.rank) : "")
                   << "," << fact("table_witness") << "," << fact("s") << "," << fact("v_p_val")
                   << "," << fact("v_q_val") << "," << fact("h_K+") << "," << fact("h_L1") << ","
                   << fact("h_L2") << "," << (row_member(rec, r.rule) ? "true" : "false") << "\n";
            }
            break;
        case OutputFormat::text:
            os << "p=" << r.p << " d=" << r.d << " q_max=" << r.q_max << " rule=" << to_string(r.rule)
               << " candidates=" << r.records.size() << " count=" << r.row.size() << "\n";
            for (std::size_t i = 0; i < r.row.size(); ++i) os << (i ? "," : "") << r.row[i];
            os << "\n";
            break;
    }
}

inline json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json j = {{"p", row.p}, {"q", row.qs}};
        if (row.error) j["error"] = *row.error;
        rows.push_back(j);
    }
    return {{"d", t.d}, {"q_max", t.q_max}, {"rule", to_string(t.rule)}, {"rows", rows}};
}

inline void render(std::ostream& os, const Table& t, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json:
            os << to_json(t).dump(2) << "\n";
            break;
        case OutputFormat::csv:
            os << "p,q\n";
            for (const auto& row : t.rows)
                for (i64 q : row.qs) os << row.p << "," << q << "\n";
            break;
        case OutputFormat::text:
            for (const auto& row : t.rows) {
                os << row.p << " | ";
                if (row.error) {
                    os << "error: " << *row.error << "\n";
                    continue;
                }
                os << "{";
                for (std::size_t i = 0; i < row.qs.size(); ++i) os << (i ? "," : "") << row.qs[i];
                os << "}\n";
            }
            break;
    }
}

}  // namespace prational
