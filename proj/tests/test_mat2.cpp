#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "solaut/mat2.hpp"

using namespace solaut;

namespace {

std::mt19937_64 rng(20240901);

Int rnd(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

// random unimodular matrix as a short product of elementary matrices
Mat2 random_unimodular() {
    Mat2 m = Mat2::identity();
    int steps = static_cast<int>(rnd(2, 6).convert_to<int>());
    for (int i = 0; i < steps; ++i) {
        Int k = rnd(-3, 3);
        if (rnd(0, 1) == 0) m = m * Mat2{1, k, 0, 1};
        else m = m * Mat2{1, 0, k, 1};
    }
    if (rnd(0, 1) == 0) m = m * Mat2{1, 0, 0, -1};
    if (rnd(0, 1) == 0) m = -m;
    return m;
}

} // namespace

TEST_CASE("matrix product") {
    Mat2 X{7, -3, 2, 5};
    CHECK(Mat2::identity() * X == X);
    CHECK(Mat2{1, 1, 1, 0} * Mat2{1, 1, 1, 0} == Mat2{2, 1, 1, 1});
    CHECK(Mat2{0, -1, 1, 0} * Mat2{2, 1, 1, 1} == Mat2{-1, -1, 2, 1});
}

TEST_CASE("det, trace, inverse") {
    CHECK(Mat2{2, 1, 1, 1}.det() == 1);
    CHECK(Mat2{2, 1, 1, 1}.trace() == 3);
    CHECK(inverse(Mat2{2, 5, 1, 3}) == Mat2{3, -5, -1, 2});
    CHECK_THROWS_AS(inverse(Mat2{2, 0, 0, 2}), NotUnimodular);
    for (int i = 0; i < 200; ++i) {
        Mat2 m = random_unimodular();
        CHECK(m * inverse(m) == Mat2::identity());
    }
}

TEST_CASE("powers") {
    Mat2 X{5, 2, -1, 3};
    CHECK(power(X, 0) == Mat2::identity());
    CHECK(power(Mat2{1, 1, 1, 0}, 2) == Mat2{2, 1, 1, 1});
    CHECK(power(Mat2{2, 1, 1, 1}, -1) == Mat2{1, -1, -1, 2});
    CHECK_THROWS_AS(power(Mat2{2, 0, 0, 2}, -1), NotUnimodular);
    for (int i = 0; i < 50; ++i) {
        Mat2 m = random_unimodular();
        for (int k = -6; k <= 6; ++k)
            CHECK(power(m, k) * power(m, -k) == Mat2::identity());
    }
}

TEST_CASE("smith normal form 2x2") {
    auto s1 = smith_normal_form(Mat2::identity());
    CHECK(s1.S == Mat2::identity());

    auto s2 = smith_normal_form(Mat2{-1, -1, -1, 0});  // I - (2,1;1,1)
    CHECK(s2.S == Mat2::diag(1, 1));

    auto s3 = smith_normal_form(Mat2::diag(2, 4));
    CHECK(s3.S == Mat2::diag(2, 4));

    for (int i = 0; i < 300; ++i) {
        Mat2 a{rnd(-9, 9), rnd(-9, 9), rnd(-9, 9), rnd(-9, 9)};
        auto s = smith_normal_form(a);
        CHECK(s.U * a * s.V == s.S);
        CHECK(abs_int(s.U.det()) == 1);
        CHECK(abs_int(s.V.det()) == 1);
        CHECK(s.S.b == 0);
        CHECK(s.S.c == 0);
        CHECK(s.S.a >= 0);
        CHECK(s.S.d >= 0);
        if (s.S.a != 0) CHECK(s.S.d % s.S.a == 0);
        CHECK(abs_int(a.det()) == s.S.a * s.S.d);
    }
}

TEST_CASE("solve_linear basic shapes") {
    auto u = solve_linear(Mat2::identity(), Vec2{3, 4});
    REQUIRE(u.kind == LinearSolution::Kind::Unique);
    CHECK(u.particular == Vec2{3, 4});

    // up + tq = tn with (u,t,n) = (3,1,2): one equation, rank 1.
    // General solution per the closed form p = rtn + ct, q = -stn - cu with
    // B = (1,2;1,3): the line {(2+c, -4-3c)}.
    auto fam = solve_linear(Mat2{3, 1, 0, 0}, Vec2{2, 0});
    REQUIRE(fam.kind == LinearSolution::Kind::Family);
    REQUIRE(fam.directions.size() == 1);
    for (Int c = -5; c <= 5; ++c)
        CHECK(fam.contains(Vec2{2 + c, -4 - 3 * c}));
    CHECK_FALSE(fam.contains(Vec2{1, 0}));

    auto none = solve_linear(Mat2{2, 0, 0, 0}, Vec2{1, 0});
    CHECK(none.kind == LinearSolution::Kind::NoSolution);
}

TEST_CASE("solve_linear completeness on rank-1 systems") {
    for (int trial = 0; trial < 40; ++trial) {
        // build a rank-1 matrix r * (u v) and a consistent rhs
        Int u = rnd(-4, 4), v = rnd(-4, 4);
        if (u == 0 && v == 0) u = 1;
        Int r1 = rnd(-2, 2), r2 = rnd(-2, 2);
        if (r1 == 0 && r2 == 0) r1 = 1;
        Mat2 A{r1 * u, r1 * v, r2 * u, r2 * v};
        Int t = rnd(-3, 3);
        Vec2 x0{rnd(-5, 5), rnd(-5, 5)};
        Vec2 b = A * x0;
        auto sol = solve_linear(A, b);
        REQUIRE(sol.kind != LinearSolution::Kind::NoSolution);
        (void)t;
        for (Int px = -20; px <= 20; ++px)
            for (Int py = -20; py <= 20; ++py) {
                bool hits = (A * Vec2{px, py} == b);
                CHECK(hits == sol.contains(Vec2{px, py}));
            }
    }
}

TEST_CASE("mod2") {
    CHECK(mod2(Mat2{1, 0, 0, -1}) == Mat2::identity());
    CHECK(mod2(Mat2{1, 1, 0, -1}) == Mat2{1, 1, 0, 1});
    CHECK(mod2(Mat2{2, 2, 2, 2}) == Mat2::zero());
}

TEST_CASE("general integer systems") {
    // 4x2 overdetermined consistent system
    IntMat m(4, 2);
    m.at(0, 0) = 1; m.at(0, 1) = 2;
    m.at(1, 0) = 0; m.at(1, 1) = 1;
    m.at(2, 0) = 3; m.at(2, 1) = -1;
    m.at(3, 0) = 2; m.at(3, 1) = 2;
    std::vector<Int> x{5, -7};
    auto b = m.apply(x);
    auto sol = solve_integer_system(m, b);
    REQUIRE(sol.solvable);
    CHECK(sol.particular == x);
    CHECK(sol.kernel.empty());

    b[0] += 1;
    CHECK_FALSE(solve_integer_system(m, b).solvable);
}
