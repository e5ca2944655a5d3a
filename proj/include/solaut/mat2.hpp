#pragma once

#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "solaut/int.hpp"

namespace solaut {

struct Vec2 {
    Int x{0}, y{0};

    bool operator==(const Vec2&) const = default;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(const Int& s) const { return {x * s, y * s}; }
    bool is_zero() const { return x == 0 && y == 0; }
};

// 2x2 integer matrix, row-major: [[a,b],[c,d]].
struct Mat2 {
    Int a{0}, b{0}, c{0}, d{0};

    bool operator==(const Mat2&) const = default;

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 zero() { return {0, 0, 0, 0}; }
    static Mat2 diag(const Int& p, const Int& q) { return {p, 0, 0, q}; }

    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d,
                c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator+(const Mat2& m) const { return {a + m.a, b + m.b, c + m.c, d + m.d}; }
    Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Int det() const { return a * d - b * c; }
    Int trace() const { return a + d; }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 adjugate() const { return {d, -b, -c, a}; }
    Int max_abs() const {
        Int m = abs_int(a);
        for (const Int* e : {&b, &c, &d}) m = std::max(m, abs_int(*e));
        return m;
    }
    bool is_unimodular() const { Int dt = det(); return dt == 1 || dt == -1; }

    std::string str() const {
        std::ostringstream os;
        os << "(" << a << "," << b << ";" << c << "," << d << ")";
        return os.str();
    }
};

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) { return os << m.str(); }
inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << "(" << v.x << "," << v.y << ")";
}

inline Int det(const Mat2& m) { return m.det(); }
inline Int trace(const Mat2& m) { return m.trace(); }

inline Mat2 inverse(const Mat2& m) {
    Int dt = m.det();
    if (dt == 1) return m.adjugate();
    if (dt == -1) return -m.adjugate();
    throw NotUnimodular("inverse: determinant " + dt.str() + " is not a unit");
}

inline Mat2 power(const Mat2& m, const Int& k) {
    Mat2 base = m;
    Int n = k;
    if (n < 0) {
        base = inverse(m);  // throws NotUnimodular when |det| != 1
        n = -n;
    }
    Mat2 acc = Mat2::identity();
    while (n > 0) {
        if ((n & 1) != 0) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

// Entrywise reduction to residues {0,1}.
inline Mat2 mod2(const Mat2& m) {
    auto r = [](const Int& v) { return fmod(v, 2); };
    return {r(m.a), r(m.b), r(m.c), r(m.d)};
}

// ---------------------------------------------------------------------------
// Small dense integer matrices. Only the handful of shapes this project
// needs (kernels of 4x4 intertwiner systems, stacked relation systems with
// at most a dozen rows); not a general linear algebra ambition.
// ---------------------------------------------------------------------------

struct IntMat {
    int rows{0}, cols{0};
    std::vector<Int> v;

    IntMat() = default;
    IntMat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c) {}

    static IntMat identity(int n) {
        IntMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
    static IntMat from_mat2(const Mat2& m) {
        IntMat a(2, 2);
        a.at(0, 0) = m.a; a.at(0, 1) = m.b; a.at(1, 0) = m.c; a.at(1, 1) = m.d;
        return a;
    }
    Mat2 to_mat2() const {
        check_internal(rows == 2 && cols == 2, "to_mat2 on non-2x2");
        return {at(0, 0), at(0, 1), at(1, 0), at(1, 1)};
    }

    Int& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    const Int& at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const IntMat&) const = default;

    IntMat operator*(const IntMat& o) const {
        check_internal(cols == o.rows, "IntMat product shape");
        IntMat r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                const Int& aik = at(i, k);
                if (aik == 0) continue;
                for (int j = 0; j < o.cols; ++j) r.at(i, j) += aik * o.at(k, j);
            }
        return r;
    }

    std::vector<Int> apply(const std::vector<Int>& x) const {
        check_internal(static_cast<int>(x.size()) == cols, "IntMat apply shape");
        std::vector<Int> r(rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) r[i] += at(i, j) * x[j];
        return r;
    }
};

// U*A*V = S with U, V unimodular and S diagonal, nonnegative, with the
// divisibility chain s1 | s2 | ... .
struct SmithResult {
    IntMat U, S, V;
};

inline SmithResult smith_normal_form(IntMat A) {
    const int m = A.rows, n = A.cols;
    SmithResult r{IntMat::identity(m), A, IntMat::identity(n)};
    IntMat& S = r.S;
    IntMat& U = r.U;
    IntMat& V = r.V;

    auto swap_rows = [&](int i, int j) {
        if (i == j) return;
        for (int k = 0; k < n; ++k) std::swap(S.at(i, k), S.at(j, k));
        for (int k = 0; k < m; ++k) std::swap(U.at(i, k), U.at(j, k));
    };
    auto swap_cols = [&](int i, int j) {
        if (i == j) return;
        for (int k = 0; k < m; ++k) std::swap(S.at(k, i), S.at(k, j));
        for (int k = 0; k < n; ++k) std::swap(V.at(k, i), V.at(k, j));
    };
    auto addmul_row = [&](int dst, int src, const Int& q) {  // row dst += q*row src
        if (q == 0) return;
        for (int k = 0; k < n; ++k) S.at(dst, k) += q * S.at(src, k);
        for (int k = 0; k < m; ++k) U.at(dst, k) += q * U.at(src, k);
    };
    auto addmul_col = [&](int dst, int src, const Int& q) {
        if (q == 0) return;
        for (int k = 0; k < m; ++k) S.at(k, dst) += q * S.at(k, src);
        for (int k = 0; k < n; ++k) V.at(k, dst) += q * V.at(k, src);
    };
    auto negate_row = [&](int i) {
        for (int k = 0; k < n; ++k) S.at(i, k) = -S.at(i, k);
        for (int k = 0; k < m; ++k) U.at(i, k) = -U.at(i, k);
    };

    const int t_max = std::min(m, n);
    for (int t = 0; t < t_max; ++t) {
        for (;;) {
            // pivot: smallest nonzero |entry| in the trailing block
            int pi = -1, pj = -1;
            Int best = 0;
            for (int i = t; i < m; ++i)
                for (int j = t; j < n; ++j) {
                    Int a = abs_int(S.at(i, j));
                    if (a != 0 && (pi < 0 || a < best)) { best = a; pi = i; pj = j; }
                }
            if (pi < 0) { pi = pj = t; }  // trailing block is zero
            if (S.at(pi, pj) == 0) break;
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool clean = true;
            for (int i = t + 1; i < m; ++i) {
                Int q = fdiv(S.at(i, t), S.at(t, t));
                addmul_row(i, t, -q);
                if (S.at(i, t) != 0) clean = false;
            }
            for (int j = t + 1; j < n; ++j) {
                Int q = fdiv(S.at(t, j), S.at(t, t));
                addmul_col(j, t, -q);
                if (S.at(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            // divisibility: pivot must divide the rest of the block
            bool divides = true;
            for (int i = t + 1; i < m && divides; ++i)
                for (int j = t + 1; j < n && divides; ++j)
                    if (S.at(i, j) % S.at(t, t) != 0) {
                        addmul_col(t, j, 1);
                        divides = false;
                    }
            if (divides) break;
        }
        if (S.at(t, t) < 0) negate_row(t);
    }
    return r;
}

// Canonical 2x2 wrapper (the shape named in the public surface).
struct SnfResult {
    Mat2 U, S, V;
};

inline SnfResult smith_normal_form(const Mat2& a) {
    SmithResult r = smith_normal_form(IntMat::from_mat2(a));
    return {r.U.to_mat2(), r.S.to_mat2(), r.V.to_mat2()};
}

// ---------------------------------------------------------------------------
// Integer linear systems A x = b.
// ---------------------------------------------------------------------------

// Solution set of a consistent system: { particular + Z-combinations of basis }.
struct LinearSystemSolution {
    bool solvable{false};
    std::vector<Int> particular;            // one integer solution
    std::vector<std::vector<Int>> kernel;   // basis of the homogeneous lattice
};

inline LinearSystemSolution solve_integer_system(const IntMat& A, const std::vector<Int>& b) {
    check_internal(static_cast<int>(b.size()) == A.rows, "solve shape");
    SmithResult snf = smith_normal_form(A);
    std::vector<Int> c = snf.U.apply(b);
    const int m = A.rows, n = A.cols;
    std::vector<Int> y(n, 0);
    std::vector<int> free_idx;
    for (int i = 0; i < std::min(m, n); ++i) {
        const Int& s = snf.S.at(i, i);
        if (s == 0) {
            if (c[i] != 0) return {};
            free_idx.push_back(i);
        } else {
            if (c[i] % s != 0) return {};
            y[i] = c[i] / s;
        }
    }
    for (int i = std::min(m, n); i < m; ++i)
        if (c[i] != 0) return {};
    for (int i = std::min(m, n); i < n; ++i) free_idx.push_back(i);

    LinearSystemSolution out;
    out.solvable = true;
    out.particular = snf.V.apply(y);
    for (int f : free_idx) {
        std::vector<Int> col(n);
        for (int i = 0; i < n; ++i) col[i] = snf.V.at(i, f);
        out.kernel.push_back(std::move(col));
    }
    return out;
}

// 2x2 flavor: either no solution, a unique one, or an affine family.  The
// family is closed-form (never an enumeration); `directions` has one entry
// for a rank-1 system and two when A = 0 and b = 0.
struct LinearSolution {
    enum class Kind { NoSolution, Unique, Family } kind{Kind::NoSolution};
    Vec2 particular{};
    std::vector<Vec2> directions{};

    bool contains(const Vec2& p) const {
        if (kind == Kind::NoSolution) return false;
        Vec2 delta = p - particular;
        if (kind == Kind::Unique) return delta.is_zero();
        if (directions.size() == 2) {
            IntMat m(2, 2);
            m.at(0, 0) = directions[0].x; m.at(0, 1) = directions[1].x;
            m.at(1, 0) = directions[0].y; m.at(1, 1) = directions[1].y;
            return solve_integer_system(m, {delta.x, delta.y}).solvable;
        }
        const Vec2& dir = directions[0];
        // delta = t*dir for an integer t
        if (dir.x == 0 && dir.y == 0) return delta.is_zero();
        if (dir.x != 0)
            return delta.x % dir.x == 0 && delta.y * dir.x == delta.x * dir.y;
        return delta.x == 0 && delta.y % dir.y == 0;
    }
};

inline LinearSolution solve_linear(const Mat2& A, const Vec2& b) {
    LinearSystemSolution s = solve_integer_system(IntMat::from_mat2(A), {b.x, b.y});
    if (!s.solvable) return {};
    LinearSolution out;
    out.particular = {s.particular[0], s.particular[1]};
    if (s.kernel.empty()) {
        out.kind = LinearSolution::Kind::Unique;
        return out;
    }
    out.kind = LinearSolution::Kind::Family;
    for (const auto& k : s.kernel) out.directions.push_back({k[0], k[1]});
    return out;
}

// The finite abelian group Z^2 / L(Z^2) for a nonsingular integer matrix L,
// with explicit coordinates: y = U x mod (n1, n2) where U L V = diag(n1, n2).
struct Cokernel {
    Mat2 L, U, Uinv;
    Int n1{1}, n2{1};  // invariant factors, n1 | n2

    explicit Cokernel(const Mat2& lattice) : L(lattice) {
        check_internal(L.det() != 0, "cokernel of a nonsingular lattice");
        SnfResult s = smith_normal_form(L);
        U = s.U;
        Uinv = inverse(s.U);
        n1 = s.S.a;
        n2 = s.S.d;
    }

    Int order() const { return n1 * n2; }

    std::pair<Int, Int> coords(const Vec2& x) const {
        Vec2 y = U * x;
        return {fmod(y.x, n1), fmod(y.y, n2)};
    }
    Vec2 rep(const Int& i, const Int& j) const { return Uinv * Vec2{i, j}; }
    Vec2 canonical(const Vec2& x) const {
        auto [i, j] = coords(x);
        return rep(i, j);
    }
    bool contains(const Vec2& x) const {  // x in L(Z^2)?
        auto [i, j] = coords(x);
        return i == 0 && j == 0;
    }
    // matrix of the action induced by M (requires M L Z^2 <= L Z^2, which
    // holds for everything this project feeds in: M commutes with L's theta)
    Mat2 action_matrix(const Mat2& M) const { return U * M * Uinv; }
};

// Exact solve A z = w for unimodular-or-just-invertible A, integer solutions
// only. Returns nothing when the rational solution is not integral.
inline std::optional<Vec2> solve_exact_2x2(const Mat2& A, const Vec2& w) {
    Int dt = A.det();
    if (dt == 0) {
        LinearSolution s = solve_linear(A, w);
        if (s.kind == LinearSolution::Kind::NoSolution) return std::nullopt;
        return s.particular;
    }
    Vec2 adj = A.adjugate() * w;
    if (adj.x % dt != 0 || adj.y % dt != 0) return std::nullopt;
    return Vec2{adj.x / dt, adj.y / dt};
}

} // namespace solaut
