#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "prational/quadratic.hpp"

using namespace prational;

TEST(MakeField, Examples) {
    auto f = make_field(91);
    EXPECT_EQ(f.m, 91);
    EXPECT_EQ(f.disc, 364);
    EXPECT_TRUE(f.is_real);
    auto g = make_field(-2);
    EXPECT_EQ(g.disc, -8);
    EXPECT_FALSE(g.is_real);
    EXPECT_EQ(make_field(65).disc, 65);
    EXPECT_EQ(make_field(12).m, 3);
    EXPECT_EQ(make_field(-4).m, -1);
    EXPECT_THROW(make_field(0), domain_error);
    EXPECT_THROW(make_field(49), domain_error);
}

TEST(QuadElem, NormTrace) {
    auto f = make_field(91);
    auto eps = QuadElem(f, 1574, 165);
    auto nt = norm_trace(eps);
    EXPECT_EQ(nt.norm, 1);
    EXPECT_EQ(nt.trace, 3148);
    EXPECT_EQ(norm_trace(eps - 1).norm, -3146);
    EXPECT_EQ(norm_trace(eps + 1).norm, 3150);
    auto r = norm_trace(QuadElem::sqrt_m(f));
    EXPECT_EQ(r.norm, -91);
    EXPECT_EQ(r.trace, 0);
}

TEST(QuadElem, CanonicalDenominator) {
    auto f = make_field(5);
    QuadElem a(f, 2, 4, 2);
    EXPECT_EQ(a.den(), 1);
    EXPECT_EQ(a.x(), 1);
    EXPECT_EQ(a.y(), 2);
    EXPECT_THROW(QuadElem(f, 1, 2, 2), domain_error);
    EXPECT_THROW(QuadElem(make_field(3), 1, 1, 2), domain_error);
    QuadElem g(f, 1, 1, 2);
    EXPECT_EQ((g * g).to_string(), "(3 + sqrt(5))/2");
}

TEST(FundamentalUnit, Examples) {
    auto u = fundamental_unit(make_field(91));
    EXPECT_EQ(u.elem.to_string(), "1574 + 165*sqrt(91)");
    EXPECT_EQ(u.unit_norm, 1);
    auto two = fundamental_unit(make_field(2));
    EXPECT_EQ(two.elem.to_string(), "1 + sqrt(2)");
    EXPECT_EQ(two.unit_norm, -1);
    auto five = fundamental_unit(make_field(5));
    EXPECT_EQ(five.elem.to_string(), "(1 + sqrt(5))/2");
    EXPECT_EQ(five.unit_norm, -1);
    EXPECT_EQ(fundamental_unit(make_field(13)).elem.to_string(), "(3 + sqrt(13))/2");
    EXPECT_EQ(fundamental_unit(make_field(21)).elem.to_string(), "(5 + sqrt(21))/2");
    EXPECT_EQ(fundamental_unit(make_field(7)).elem.to_string(), "8 + 3*sqrt(7)");
    EXPECT_EQ(fundamental_unit(make_field(11)).elem.to_string(), "10 + 3*sqrt(11)");
    EXPECT_THROW(fundamental_unit(make_field(-2)), domain_error);
}

TEST(FundamentalUnit, MatchesPellSearchWhereFeasible) {
    for (i64 m = 2; m < 300; ++m) {
        if (!is_squarefree(m)) continue;
        auto found = oracle::pell_search(m, 20000);
        if (!found) continue;
        auto u = fundamental_unit(make_field(m));
        QuadElem want(make_field(m), found->x, found->y, found->den);
        EXPECT_EQ(u.elem, want) << "m=" << m;
        EXPECT_EQ(u.unit_norm, found->norm) << "m=" << m;
    }
}

TEST(FundamentalUnit, NormAndFastNormAgree) {
    for (i64 m = 2; m < 2000; ++m) {
        if (!is_squarefree(m)) continue;
        auto f = make_field(m);
        auto u = fundamental_unit(f);
        EXPECT_EQ(u.elem.norm(), u.unit_norm);
        EXPECT_EQ(fundamental_unit_norm(f), u.unit_norm);
        EXPECT_GT(u.elem.x(), 0);
        EXPECT_GT(u.elem.y(), 0);
    }
}

TEST(FundamentalUnit, NormIdentities) {
    for (i64 m = 2; m < 500; ++m) {
        if (!is_squarefree(m)) continue;
        auto f = make_field(m);
        auto e = fundamental_unit(f).elem;
        mpz_class n = e.norm(), t = e.trace();
        EXPECT_EQ((e - 1).norm(), n - t + 1);
        EXPECT_EQ((e + 1).norm(), n + t + 1);
        EXPECT_EQ((e - 1).norm() * (e + 1).norm(), (e * e - 1).norm());
    }
}

TEST(ModularUnit, MatchesExactReduction) {
    for (i64 m = 2; m < 1500; ++m) {
        if (!is_squarefree(m)) continue;
        auto f = make_field(m);
        auto e = fundamental_unit(f);
        std::vector<i64> moduli{343, 2197, 125, 24389};
        auto r = fundamental_unit_mod(f, moduli);
        EXPECT_EQ(r.unit_norm, e.unit_norm);
        EXPECT_EQ(r.cf_steps, e.cf_steps);
        for (i64 md : moduli) {
            const auto& res = r.at(md);
            // (x + y sqrt m)/den = a + b sqrt m mod md
            mpz_class a = res.a, b = res.b;
            mpz_class lhs_x = (e.elem.x() - a * e.elem.den()) % md;
            mpz_class lhs_y = (e.elem.y() - b * e.elem.den()) % md;
            EXPECT_EQ(lhs_x, 0) << m << " mod " << md;
            EXPECT_EQ(lhs_y, 0) << m << " mod " << md;
        }
    }
}

TEST(RamifiedValuation, Examples) {
    auto f = make_field(91);
    auto eps = QuadElem(f, 1574, 165);
    auto e2m1 = eps * eps - 1;
    EXPECT_EQ(ramified_valuation(e2m1, 7), 1);
    EXPECT_EQ(ramified_valuation(e2m1, 13), 1);
    EXPECT_EQ(ramified_valuation(QuadElem::sqrt_m(f), 7), 1);
    EXPECT_THROW(ramified_valuation(eps, 5), domain_error);
    EXPECT_THROW(ramified_valuation(QuadElem::sqrt_m(make_field(2)), 2), domain_error);
}

TEST(RamifiedValuation, Multiplicative) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<i64> dist(-500, 500);
    for (i64 m : {91, 35, 65, 7 * 29, 5 * 79}) {
        auto f = make_field(m);
        i64 ell = padic_valuation(m, 7).v ? 7 : 5;
        for (int i = 0; i < 200; ++i) {
            QuadElem a(f, dist(rng), dist(rng)), b(f, dist(rng), dist(rng));
            if (a.norm() == 0 || b.norm() == 0) continue;
            EXPECT_EQ(ramified_valuation(a * b, ell), ramified_valuation(a, ell) + ramified_valuation(b, ell));
        }
    }
}

TEST(Eps2Minus1, ModularMatchesExact) {
    for (i64 p : {5, 7, 13, 29}) {
        for (i64 q = p - 1; q < 3000; q += p) {
            if (!is_prime(q)) continue;
            auto f = make_field(p * q);
            auto e = fundamental_unit(f);
            auto e2 = e.elem * e.elem - 1;
            for (i64 ell : {p, q}) {
                i64 md = ell * ell * ell;
                std::vector<i64> moduli{md};
                auto r = fundamental_unit_mod(f, moduli);
                auto fast = eps2_minus_1_valuation(r.unit_norm, r.at(md), ell, 3);
                int exact = ramified_valuation(e2, ell);
                if (exact >= 3) {
                    EXPECT_TRUE(fast.at_least) << p << " " << q;
                } else {
                    EXPECT_EQ(fast, (CappedValuation{exact, false})) << p << " " << q;
                }
            }
        }
    }
}

TEST(CappedValuation, TextRoundTrip) {
    for (CappedValuation v : {CappedValuation{0, false}, CappedValuation{2, false}, CappedValuation{3, true}}) {
        auto back = CappedValuation::parse(v.to_string());
        ASSERT_TRUE(back);
        EXPECT_EQ(*back, v);
    }
    EXPECT_EQ(CappedValuation({3, true}).to_string(), "≥3");
    EXPECT_FALSE(CappedValuation::parse("3x"));
    EXPECT_TRUE(CappedValuation({2, false}).le(2));
    EXPECT_FALSE(CappedValuation({3, true}).le(5));
}

TEST(Oracle, UnitPowerDetectsPowers) {
    for (i64 m : {2, 5, 13, 94, 193, 211}) {
        auto f = make_field(m);
        auto e = fundamental_unit(f).elem;
        EXPECT_FALSE(oracle::is_unit_power(e.x(), e.y(), e.den(), m, 60)) << m;
        for (auto pw : {e * e, e * e * e}) EXPECT_TRUE(oracle::is_unit_power(pw.x(), pw.y(), pw.den(), m, 60)) << m;
    }
}
