#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "vekua/dual.hpp"

using namespace vekua;

namespace {

Slot su2_slot(std::int64_t twice_ell, std::int64_t twice_m, std::int64_t twice_n) {
    Slot s;
    s.rep.taus = {};
    s.rep.twice_ells = {twice_ell};
    s.twice_ms = {twice_m};
    s.twice_ns = {twice_n};
    return s;
}

}  // namespace

TEST_CASE("group spec identity", "[dual]") {
    REQUIRE(GroupSpec(1, 1) == GroupSpec(1, 1));
    REQUIRE(GroupSpec(2, 0) != GroupSpec(1, 1));
    REQUIRE(GroupSpec(1, 2).to_string() == "T^1 x SU(2)^2");
}

TEST_CASE("weights and dimensions", "[dual]") {
    RepIndex r;
    r.taus = {3, -1};
    r.twice_ells = {1};
    // 1 + 9 + 1 + (1/2)(3/2)
    REQUIRE(weight_squared(r) == Rational(47, 4));
    REQUIRE(rep_dimension(r) == 2);

    RepIndex s;
    s.taus = {};
    s.twice_ells = {3, 2};
    REQUIRE(rep_dimension(s) == 12);
    REQUIRE(weight_squared(s) == Rational(1) + Rational(15, 4) + Rational(2));
}

TEST_CASE("rep enumeration is complete, bounded, and weight sorted", "[dual]") {
    GroupSpec t1(1, 0);
    auto reps = enumerate_reps(t1, Rational(2));
    REQUIRE(reps.size() == 3);
    REQUIRE(reps[0].taus == std::vector<std::int64_t>{0});
    REQUIRE(reps[1].taus == std::vector<std::int64_t>{-1});
    REQUIRE(reps[2].taus == std::vector<std::int64_t>{1});

    REQUIRE(enumerate_reps(t1, Rational(3)).size() == 5);
    REQUIRE(enumerate_reps(GroupSpec(2, 0), Rational(2)).size() == 9);

    GroupSpec su2(0, 1);
    auto sreps = enumerate_reps(su2, Rational(2));
    REQUIRE(sreps.size() == 3);
    REQUIRE(sreps[2].twice_ells == std::vector<std::int64_t>{2});
    REQUIRE(enumerate_reps(su2, Rational(3)).size() == 5);

    GroupSpec mixed(1, 1);
    auto mreps = enumerate_reps(mixed, Rational(6));
    Rational budget = Rational(36);
    Rational prev(0);
    std::set<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> seen;
    for (const auto& rep : mreps) {
        Rational w2 = weight_squared(rep);
        REQUIRE(w2 <= budget);
        REQUIRE(prev <= w2);
        prev = w2;
        REQUIRE(seen.insert({rep.taus, rep.twice_ells}).second);
    }
    // Nothing inside the ball is missed.
    std::size_t direct = 0;
    for (std::int64_t t = -6; t <= 6; ++t)
        for (std::int64_t tl = 0; tl <= 12; ++tl) {
            RepIndex rep;
            rep.taus = {t};
            rep.twice_ells = {tl};
            if (weight_squared(rep) <= budget) ++direct;
        }
    REQUIRE(mreps.size() == direct);
}

TEST_CASE("row iteration order matches flat indexing", "[dual]") {
    RepIndex r;
    r.taus = {};
    r.twice_ells = {3};
    std::vector<std::int64_t> order;
    for_each_m(r, [&](const std::vector<std::int64_t>& m) { order.push_back(m[0]); });
    REQUIRE(order == std::vector<std::int64_t>{-3, -1, 1, 3});
    for (std::int64_t i = 0; i < 4; ++i) REQUIRE(flat_index(r, {order[i]}) == i);

    RepIndex two;
    two.taus = {};
    two.twice_ells = {1, 1};
    std::vector<std::vector<std::int64_t>> rows;
    for_each_m(two, [&](const std::vector<std::int64_t>& m) { rows.push_back(m); });
    REQUIRE(rows.size() == 4);
    // Factor 0 varies fastest.
    REQUIRE(rows[0] == std::vector<std::int64_t>{-1, -1});
    REQUIRE(rows[1] == std::vector<std::int64_t>{1, -1});
    REQUIRE(rows[2] == std::vector<std::int64_t>{-1, 1});
    REQUIRE(rows[3] == std::vector<std::int64_t>{1, 1});
    for (std::int64_t i = 0; i < 4; ++i) REQUIRE(flat_index(two, rows[i]) == i);
}

TEST_CASE("validation rejects malformed reps and slots", "[dual]") {
    GroupSpec g(1, 1);
    RepIndex bad_shape;
    bad_shape.taus = {0, 0};
    bad_shape.twice_ells = {2};
    REQUIRE_THROWS_AS(validate_rep(g, bad_shape), std::invalid_argument);

    RepIndex neg;
    neg.taus = {0};
    neg.twice_ells = {-2};
    REQUIRE_THROWS_AS(validate_rep(g, neg), std::invalid_argument);

    Slot s;
    s.rep.taus = {1};
    s.rep.twice_ells = {2};
    s.twice_ms = {4};  // out of range
    s.twice_ns = {0};
    REQUIRE_THROWS_AS(validate_slot(g, s), std::invalid_argument);
    s.twice_ms = {1};  // parity mismatch with 2l = 2
    REQUIRE_THROWS_AS(validate_slot(g, s), std::invalid_argument);
    s.twice_ms = {2};
    validate_slot(g, s);
}

TEST_CASE("slot conjugation is an involution with unit phase product", "[dual]") {
    Slot s;
    s.rep.taus = {2, -3};
    s.rep.twice_ells = {3};
    s.twice_ms = {1};
    s.twice_ns = {-3};

    ConjugateSlot c = conjugate_slot(s);
    REQUIRE(c.slot.rep.taus == std::vector<std::int64_t>{-2, 3});
    REQUIRE(c.slot.twice_ms == std::vector<std::int64_t>{-1});
    REQUIRE(c.slot.twice_ns == std::vector<std::int64_t>{3});

    ConjugateSlot back = conjugate_slot(c.slot);
    REQUIRE(back.slot == s);
    REQUIRE(c.phase * back.phase == 1);
}

TEST_CASE("conjugation phases", "[dual]") {
    REQUIRE(conjugate_slot(su2_slot(1, 1, -1)).phase == -1);
    REQUIRE(conjugate_slot(su2_slot(2, 2, -2)).phase == 1);
    REQUIRE(conjugate_slot(su2_slot(2, 2, 0)).phase == -1);
    REQUIRE(conjugate_slot(su2_slot(3, 3, 1)).phase == -1);
    REQUIRE(conjugate_slot(su2_slot(3, 3, -1)).phase == 1);

    // A torus factor contributes no sign.
    Slot s;
    s.rep.taus = {5};
    s.rep.twice_ells = {};
    s.twice_ms = {};
    s.twice_ns = {};
    REQUIRE(conjugate_slot(s).phase == 1);
    REQUIRE(conjugate_slot(s).slot.rep.taus == std::vector<std::int64_t>{-5});
}

TEST_CASE("self dual slots", "[dual]") {
    REQUIRE(is_self_dual(su2_slot(2, 0, 0)));
    REQUIRE(!is_self_dual(su2_slot(2, 2, 0)));
    Slot s;
    s.rep.taus = {0};
    s.rep.twice_ells = {};
    s.twice_ms = {};
    s.twice_ns = {};
    REQUIRE(is_self_dual(s));
    s.rep.taus = {1};
    REQUIRE(!is_self_dual(s));
}

TEST_CASE("zigzag order", "[dual]") {
    REQUIRE(zigzag(0) == 0);
    REQUIRE(zigzag(1) == 1);
    REQUIRE(zigzag(-1) == 2);
    REQUIRE(zigzag(2) == 3);
    REQUIRE(zigzag(-2) == 4);

    Slot a = su2_slot(2, 0, 0), b = su2_slot(2, 2, 0), c = su2_slot(2, -2, 0);
    REQUIRE(slot_zigzag_less(a, b));
    REQUIRE(slot_zigzag_less(b, c));
    REQUIRE(!slot_zigzag_less(c, b));
}

TEST_CASE("symbol evaluation on exact coefficients", "[dual]") {
    VectorFieldSpec vf;
    vf.torus_coeffs = {ExactReal(1), ExactReal(2)};
    vf.su2_coeffs = {};

    Slot s;
    s.rep.taus = {3, -1};
    s.rep.twice_ells = {};
    s.twice_ms = {};
    s.twice_ns = {};
    LambdaEval l = lambda(vf, s);
    REQUIRE(l.is_exact());
    REQUIRE(*l.exact == ExactReal(1));
    REQUIRE(l.enclosure.lo == Rational(1));
    REQUIRE(l.enclosure.hi == Rational(1));

    VectorFieldSpec mixed;
    mixed.torus_coeffs = {ExactReal(Rational(1, 2))};
    mixed.su2_coeffs = {ExactReal(Rational(0), Rational(1), 3)};
    Slot t;
    t.rep.taus = {4};
    t.rep.twice_ells = {3};
    t.twice_ms = {3};
    t.twice_ns = {-1};
    LambdaEval lm = lambda(mixed, t);
    REQUIRE(lm.is_exact());
    REQUIRE(*lm.exact == ExactReal(Rational(2), Rational(3, 2), 3));

    // Symbol is odd under slot conjugation.
    LambdaEval lc = lambda(mixed, conjugate_slot(t).slot);
    REQUIRE(*lc.exact == -*lm.exact);
}

TEST_CASE("symbol evaluation with a continued-fraction coefficient", "[dual]") {
    VectorFieldSpec vf;
    vf.torus_coeffs = {};
    vf.su2_coeffs = {ExactReal::continued_fraction({1, 1, 2, 6, 24, 120, 720, 5040})};

    LambdaEval l = lambda(vf, su2_slot(2, 2, 0));
    REQUIRE(!l.is_exact());
    REQUIRE(l.enclosure.lo < l.enclosure.hi);
    REQUIRE(l.enclosure.strictly_positive());

    // m = 0 rows never touch the CF coefficient.
    LambdaEval z = lambda(vf, su2_slot(2, 0, 0));
    REQUIRE(z.is_exact());
    REQUIRE(z.exact->is_zero());

    // Enclosures are mirrored exactly on the conjugate slot.
    LambdaEval lc = lambda(vf, conjugate_slot(su2_slot(2, 2, 0)).slot);
    REQUIRE(lc.enclosure.lo == -l.enclosure.hi);
    REQUIRE(lc.enclosure.hi == -l.enclosure.lo);
}
