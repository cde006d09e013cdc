#pragma once

/**
 * @file cli.hpp
 * @brief Command-line dispatcher behind the `prat` tool.
 *
 *   prat check --p P --q Q --d D [--mode exact|modular] [--format F]
 *   prat scan  --p P --d D --q-max N [--jobs J] [--cache FILE] [--rule R] [--format F]
 *   prat table --p-list P1,P2,... --d D --q-max N [--jobs J] [--rule R] [--format F]
 *   prat quad unit --m M
 *   prat quad classno --disc D
 *   prat quad prat --m M --p P
 *
 * Exit status: 0 when an answer was produced (NOT_CERTIFIED included),
 * 2 for invalid input, 1 for internal errors.
 */

#include "CLI11.hpp"

#include <ostream>
#include <string>
#include <algorithm>
#include <vector>

#include "prational/classno.hpp"
#include "prational/criteria.hpp"
#include "prational/report.hpp"
#include "prational/scan.hpp"

namespace prational::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_invalid = 2;

struct Environment {
    bool color = false;
};

namespace detail {

inline OutputFormat format_or_throw(const std::string& s) {
    if (auto f = parse_format(s)) return *f;
    throw domain_error("unknown format: " + s);
}

inline RowRule rule_or_throw(const std::string& s) {
    if (auto r = parse_row_rule(s)) return *r;
    throw domain_error("unknown rule: " + s);
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err,
               Environment env = {}) {
    CLI::App app{"p-rationality and Iwasawa-module freeness certifier", "prat"};
    app.require_subcommand(1);

    std::string format = "text";
    i64 p = 0, q = 0, d = 0, q_max = 0, m = 0, disc = 0;
    int jobs = 1;
    std::string cache, rule = "certified", mode = "exact";
    std::vector<i64> p_list;

    auto* check = app.add_subcommand("check", "certify the freeness hypotheses for one (p, q, d)");
    check->add_option("--p", p, "prime p > 3")->required();
    check->add_option("--q", q, "prime q = -1 mod p")->required();
    check->add_option("--d", d, "positive squarefree d")->required();
    check->add_option("--mode", mode, "unit arithmetic: exact or modular");
    check->add_option("--format", format, "text, json or csv");

    auto* scan = app.add_subcommand("scan", "sweep q <= q-max for fixed p and d");
    scan->add_option("--p", p)->required();
    scan->add_option("--d", d)->required();
    scan->add_option("--q-max", q_max)->required();
    scan->add_option("--jobs", jobs);
    scan->add_option("--cache", cache, "append-only JSON-lines cache");
    scan->add_option("--rule", rule, "row rule: certified or witness");
    scan->add_option("--format", format);

    auto* table = app.add_subcommand("table", "one scan row per p");
    table->add_option("--p-list", p_list)->required()->delimiter(',');
    table->add_option("--d", d)->required();
    table->add_option("--q-max", q_max)->required();
    table->add_option("--jobs", jobs);
    table->add_option("--rule", rule);
    table->add_option("--format", format);

    auto* quad = app.add_subcommand("quad", "quadratic-field utilities");
    quad->require_subcommand(1);
    auto* unit = quad->add_subcommand("unit", "fundamental unit of Q(sqrt m)");
    unit->add_option("--m", m)->required();
    unit->add_option("--format", format);
    auto* classno = quad->add_subcommand("classno", "class number of a fundamental discriminant");
    classno->add_option("--disc", disc)->required();
    classno->add_option("--format", format);
    auto* prat = quad->add_subcommand("prat", "p-rationality of Q(sqrt m)");
    prat->add_option("--m", m)->required();
    prat->add_option("--p", p)->required();
    prat->add_option("--format", format);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return exit_invalid;
    }

    try {
        const OutputFormat fmt = detail::format_or_throw(format);

        if (*check) {
            auto v = validate_family(p, q, d);
            if (!v.ok()) {
                for (const auto& why : v.reasons) err << "invalid input: " << why << "\n";
                return exit_invalid;
            }
            FreenessReport r = certify_freeness(p, q, d, parse_mode(mode));
            if (fmt == OutputFormat::json) out << to_json(r).dump(2) << "\n";
            else if (fmt == OutputFormat::csv) render_csv(out, r);
            else render_text(out, r, env.color);
            return exit_ok;
        }

        if (*scan) {
            ScanOptions opt;
            opt.p = p;
            opt.d = d;
            opt.q_max = q_max;
            opt.jobs = jobs;
            opt.rule = detail::rule_or_throw(rule);
            if (!cache.empty()) opt.cache = cache;
            ScanResult res = scan_q(opt);
            for (const auto& msg : res.diagnostics) err << "warning: " << msg << "\n";
            render(out, res, fmt);
            return exit_ok;
        }

        if (*table) {
            Table t = reproduce_table(p_list, q_max, d, jobs, detail::rule_or_throw(rule));
            render(out, t, fmt);
            return exit_ok;
        }

        if (*unit) {
            FundUnit u = fundamental_unit(make_field(m));
            if (fmt == OutputFormat::json) out << to_json(u).dump(2) << "\n";
            else if (fmt == OutputFormat::csv)
                out << "m,x,y,den,norm\n" << u.elem.field().m << "," << u.elem.x().get_str() << ","
                    << u.elem.y().get_str() << "," << u.elem.den() << "," << u.unit_norm << "\n";
            else out << describe(u) << "\n";
            return exit_ok;
        }

        if (*classno) {
            ClassNumberResult c = disc < 0 ? h_imaginary(disc) : h_plus_real(disc);
            if (fmt == OutputFormat::json) out << to_json(c).dump(2) << "\n";
            else if (fmt == OutputFormat::csv)
                out << "disc,h,h_plus,method\n" << c.disc << "," << c.h << "," << c.h_plus << ","
                    << to_string(c.method) << "\n";
            else
                out << "disc=" << c.disc << " h=" << c.h << " h_plus=" << c.h_plus
                    << " method=" << to_string(c.method) << "\n";
            return exit_ok;
        }

        if (*prat) {
            QuadField f = make_field(m);
            PRationalityReport r = f.is_real ? prat_real(f.m, p) : prat_imag(-f.m, p);
            if (fmt == OutputFormat::json) {
                out << to_json(r).dump(2) << "\n";
            } else if (fmt == OutputFormat::csv) {
                out << "check,value,passed\n";
                for (const auto& c : r.checks)
                    out << "\"" << c.name << "\"," << c.value << "," << (c.passed ? "true" : "false")
                        << "\n";
            } else {
                for (const auto& c : r.checks)
                    out << c.name << ": " << c.value << (c.passed ? "" : "  [fails]") << "\n";
                out << "p-rational: " << (r.verdict ? "yes" : "no") << "\n";
            }
            return exit_ok;
        }
    } catch (const domain_error& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_invalid;
}

}  // namespace prational::cli
