#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "solaut/structure.hpp"

using namespace solaut;

namespace {

TreePtr dihedral8_tree() {
    // (Z2 + Z2) x| Z2 with the actor sending a -> ab, b -> b
    TreePtr klein = StructureTree::finite_abelian({2, 2}, {"a", "b"});
    return StructureTree::semidirect(klein, 2, "c", {GenWord{{0, 1}, {1, 1}}, GenWord{{1, 1}}});
}

TreePtr quaternion8_tree() {
    // Z4 .ext Z2 with x g x^-1 = g^-1 and x^2 = g^2
    TreePtr z4 = StructureTree::cyclic(4, "g");
    return StructureTree::extension(z4, 2, "x", {GenWord{{0, -1}}}, GenWord{{0, 2}});
}

void check_axioms(const FiniteGroup& g, bool exhaustive) {
    const int64_t n = g.order();
    for (int64_t i = 0; i < n; ++i) {
        CHECK(g.mult(0, i) == i);
        CHECK(g.mult(i, 0) == i);
        CHECK(g.mult(i, g.inverse(i)) == 0);
        CHECK(g.mult(g.inverse(i), i) == 0);
    }
    if (exhaustive) {
        for (int64_t x = 0; x < n; ++x)
            for (int64_t y = 0; y < n; ++y)
                for (int64_t z = 0; z < n; ++z)
                    if (g.mult(g.mult(x, y), z) != g.mult(x, g.mult(y, z))) {
                        FAIL("associativity violated");
                    }
    } else {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<int64_t> d(0, n - 1);
        for (int i = 0; i < 20000; ++i) {
            int64_t x = d(rng), y = d(rng), z = d(rng);
            CHECK(g.mult(g.mult(x, y), z) == g.mult(x, g.mult(y, z)));
        }
    }
}

} // namespace

TEST_CASE("cyclic and abelian realizations") {
    auto c4 = realize(StructureTree::cyclic(4, "g"));
    CHECK(c4->order() == 4);
    CHECK(c4->element_order(c4->generator(0)) == 4);
    check_axioms(*c4, true);

    auto t = realize(trivial_group());
    CHECK(t->order() == 1);

    auto ab = realize(StructureTree::finite_abelian({2, 4}, {"x", "y"}));
    CHECK(ab->order() == 8);
    check_axioms(*ab, true);
}

TEST_CASE("dihedral and quaternion via semidirect / extension nodes") {
    auto d4 = realize(dihedral8_tree());
    CHECK(d4->order() == 8);
    check_axioms(*d4, true);
    // D4 has five involutions, Q8 exactly one
    CHECK(d4->order_histogram()[2] == 5);

    auto q8 = realize(quaternion8_tree());
    CHECK(q8->order() == 8);
    check_axioms(*q8, true);
    CHECK(q8->order_histogram()[2] == 1);
    CHECK_FALSE(isomorphic(*d4, *q8));
}

TEST_CASE("realization rejects malformed trees") {
    CHECK_THROWS_AS(realize(StructureTree::integers("z")), InfiniteTree);
    CHECK_THROWS_AS(realize(StructureTree::cyclic(100000, "g"), 2048), TooLarge);
    // action must be an automorphism: g -> g^2 on Z4 is not
    TreePtr bad = StructureTree::semidirect(StructureTree::cyclic(4, "g"), 2, "x",
                                            {GenWord{{0, 2}}});
    CHECK_THROWS_AS(realize(bad), InternalCheck);
    // power word must satisfy act^n = conj_w: x g x^-1 = g^-1 with x^2 = g
    TreePtr bad2 = StructureTree::extension(StructureTree::cyclic(4, "g"), 2, "x",
                                            {GenWord{{0, -1}}}, GenWord{{0, 1}});
    CHECK_THROWS_AS(realize(bad2), InternalCheck);
}

TEST_CASE("presentation verification") {
    auto d4 = realize(dihedral8_tree());
    Presentation p;
    p.generators = {"a", "b", "c"};
    p.relators = {
        {"a^2 = 1", {{0, 2}}},
        {"b^2 = 1", {{1, 2}}},
        {"c^2 = 1", {{2, 2}}},
        {"ab = ba", {{0, 1}, {1, 1}, {0, -1}, {1, -1}}},
        {"c a c^-1 = a b", {{2, 1}, {0, 1}, {2, -1}, {1, -1}, {0, -1}}},
        {"c b c^-1 = b", {{2, 1}, {1, 1}, {2, -1}, {1, -1}}},
    };
    std::vector<int64_t> assign{d4->generator(0), d4->generator(1), d4->generator(2)};
    auto rep = verify_presentation(p, *d4, assign);
    CHECK(rep.relators_ok);
    CHECK(rep.generates);

    // corrupted relator reported by name
    Presentation bad = p;
    bad.relators.push_back({"c a c^-1 = a", {{2, 1}, {0, 1}, {2, -1}, {0, -1}}});
    auto rep2 = verify_presentation(bad, *d4, assign);
    CHECK_FALSE(rep2.relators_ok);
    CHECK(rep2.failed_relator == "c a c^-1 = a");

    // a non-generating assignment is flagged
    auto rep3 = verify_presentation(Presentation{{"a"}, {{"a^2 = 1", {{0, 2}}}}}, *d4,
                                    {d4->generator(0)});
    CHECK(rep3.relators_ok);
    CHECK_FALSE(rep3.generates);

    // trivial presentation on the trivial group
    auto t = realize(trivial_group());
    auto rep4 = verify_presentation(Presentation{}, *t, {});
    CHECK(rep4.ok());
}

TEST_CASE("isomorphism testing") {
    auto d4 = realize(dihedral8_tree());
    CHECK(isomorphic(*d4, *d4));

    CHECK_FALSE(isomorphic(*realize(StructureTree::finite_abelian({2, 4}, {"x", "y"})),
                           *realize(StructureTree::cyclic(8, "g"))));

    // another D4 shape: Z4 x| Z2 by inversion
    TreePtr d4b = StructureTree::semidirect(StructureTree::cyclic(4, "r"), 2, "f",
                                            {GenWord{{0, -1}}});
    CHECK(isomorphic(*d4, *realize(d4b)));

    CHECK_FALSE(isomorphic(*realize(StructureTree::finite_abelian({3, 3}, {"x", "y"})),
                           *realize(StructureTree::cyclic(9, "g"))));
}

TEST_CASE("table-backed groups") {
    auto d4 = realize(dihedral8_tree());
    std::vector<std::vector<int64_t>> table(8, std::vector<int64_t>(8));
    for (int64_t i = 0; i < 8; ++i)
        for (int64_t j = 0; j < 8; ++j)
            table[static_cast<size_t>(i)][static_cast<size_t>(j)] = d4->mult(i, j);
    TableGroup tg(table, {d4->generator(0), d4->generator(1), d4->generator(2)}, {"a", "b", "c"});
    check_axioms(tg, true);
    std::vector<int64_t> hint1{d4->generator(0), d4->generator(1), d4->generator(2)};
    std::vector<int64_t> hint2 = hint1;
    CHECK(isomorphic(*d4, tg, &hint1, &hint2));
}

TEST_CASE("larger realization sampled axioms") {
    // ((Z3+Z3) x| Z4) x| Z2, order 72
    TreePtr base = StructureTree::finite_abelian({3, 3}, {"x", "y"});
    TreePtr mid = StructureTree::semidirect(base, 4, "s",
                                            {GenWord{{1, 1}}, GenWord{{0, -1}}});  // rotation
    TreePtr top = StructureTree::semidirect(mid, 2, "t",
                                            {GenWord{{0, -1}}, GenWord{{1, -1}}, GenWord{{2, 1}}});
    auto g = realize(top);
    CHECK(g->order() == 72);
    check_axioms(*g, false);
    CHECK(static_cast<int64_t>(g->closure({g->generator(0), g->generator(1), g->generator(2),
                                           g->generator(3)})
                                   .size()) == 72);
}
