#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "solaut/mat2.hpp"

namespace solaut {

// ---------------------------------------------------------------------------
// Exceptional / Anosov classification.  A in GL2(Z) is exceptional when
// (det = 1 and |trace| <= 2) or (det = -1 and trace = 0); Anosov otherwise.
// ---------------------------------------------------------------------------

enum class ExceptionalClass {
    Identity,          // I
    MinusIdentity,     // -I
    Order4Rotation,    // (0,-1;1,0)
    Order6,            // (0,-1;1,1)
    Order3,            // -(0,-1;1,1)
    ParabolicPlus,     // (1,n;0,1), n >= 1
    ParabolicMinus,    // -(1,n;0,1), n >= 1
    Reflection,        // (1,0;0,-1)
    ReflectionTwisted, // (1,1;0,-1)
};

struct MatrixClass {
    bool anosov{false};
    ExceptionalClass subtag{ExceptionalClass::Identity};
    Int parabolic_n{0};  // conjugacy invariant for the parabolic classes

    std::string str() const;
};

inline bool is_exceptional(const Mat2& A) {
    Int dt = A.det(), tr = A.trace();
    return (dt == 1 && abs_int(tr) <= 2) || (dt == -1 && tr == 0);
}

inline bool is_anosov(const Mat2& A) {
    if (!A.is_unimodular()) throw NotUnimodular("is_anosov: " + A.str());
    return !is_exceptional(A);
}

inline MatrixClass classify(const Mat2& A) {
    Int dt = A.det();
    if (dt != 1 && dt != -1) throw NotUnimodular("classify: " + A.str());
    MatrixClass mc;
    if (!is_exceptional(A)) {
        mc.anosov = true;
        return mc;
    }
    Int tr = A.trace();
    if (dt == -1) {
        // trace 0, order 2; mod-2 class separates the two representatives
        mc.subtag = (mod2(A) == Mat2::identity()) ? ExceptionalClass::Reflection
                                                  : ExceptionalClass::ReflectionTwisted;
        return mc;
    }
    if (tr == 0) { mc.subtag = ExceptionalClass::Order4Rotation; return mc; }
    if (tr == 1) { mc.subtag = ExceptionalClass::Order6; return mc; }
    if (tr == -1) { mc.subtag = ExceptionalClass::Order3; return mc; }
    if (tr == 2) {
        if (A == Mat2::identity()) { mc.subtag = ExceptionalClass::Identity; return mc; }
        Mat2 nil = A - Mat2::identity();
        Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs_int(nil.a), abs_int(nil.b)),
                                           boost::multiprecision::gcd(abs_int(nil.c), abs_int(nil.d)));
        mc.subtag = ExceptionalClass::ParabolicPlus;
        mc.parabolic_n = g;
        return mc;
    }
    // trace -2
    if (A == -Mat2::identity()) { mc.subtag = ExceptionalClass::MinusIdentity; return mc; }
    Mat2 nil = A + Mat2::identity();
    Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs_int(nil.a), abs_int(nil.b)),
                                       boost::multiprecision::gcd(abs_int(nil.c), abs_int(nil.d)));
    mc.subtag = ExceptionalClass::ParabolicMinus;
    mc.parabolic_n = g;
    return mc;
}

inline std::string MatrixClass::str() const {
    if (anosov) return "Anosov";
    switch (subtag) {
        case ExceptionalClass::Identity: return "exceptional(identity)";
        case ExceptionalClass::MinusIdentity: return "exceptional(-identity)";
        case ExceptionalClass::Order4Rotation: return "exceptional(order-4 rotation)";
        case ExceptionalClass::Order6: return "exceptional(order 6)";
        case ExceptionalClass::Order3: return "exceptional(order 3)";
        case ExceptionalClass::ParabolicPlus:
            return "exceptional(parabolic, n=" + parabolic_n.str() + ")";
        case ExceptionalClass::ParabolicMinus:
            return "exceptional(-parabolic, n=" + parabolic_n.str() + ")";
        case ExceptionalClass::Reflection: return "exceptional(reflection)";
        case ExceptionalClass::ReflectionTwisted: return "exceptional(twisted reflection)";
    }
    return "?";
}

// Exhaustive exponent window for matching X against powers of an Anosov M:
// |M^j| has a dominant lambda^j / sqrt(disc) term with lambda >= golden
// ratio, so |j| beyond this cap cannot match any matrix bounded by |X|.
inline long power_match_cap(const Mat2& M, const Int& bound) {
    Int disc = M.trace() * M.trace() - 4 * M.det();
    check_internal(disc > 0, "power_match_cap needs a real-split matrix");
    unsigned long db = boost::multiprecision::msb(disc) + 1;
    Int b = bound < 1 ? Int(1) : bound;
    unsigned long bb = boost::multiprecision::msb(b) + 1;
    // log2(golden ratio) > 0.69, so 1/log2(phi) < 1.5
    return static_cast<long>((db / 2 + bb + 6) * 3 / 2 + 8);
}

// Writes X = s * M0^j if possible.
inline std::optional<std::pair<int, Int>> decompose_in_root(const Mat2& M0, const Mat2& X) {
    long cap = power_match_cap(M0, X.max_abs());
    Mat2 p = Mat2::identity();
    for (long j = 0; j <= cap; ++j) {
        if (p == X) return std::make_pair(1, Int(j));
        if (p == -X) return std::make_pair(-1, Int(j));
        p = p * M0;
    }
    Mat2 mi = inverse(M0);
    p = mi;
    for (long j = 1; j <= cap; ++j) {
        if (p == X) return std::make_pair(1, Int(-j));
        if (p == -X) return std::make_pair(-1, Int(-j));
        p = p * mi;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Centralizer lattice and primitive roots.
//
// For Anosov A the commuting integer matrices form a rank-2 lattice with
// basis (I, K); its units are { +-M0^j } for a primitive root M0, and
// A = eps * M0^ell.
// ---------------------------------------------------------------------------

struct PrimitiveRootData {
    Mat2 M0;
    Int ell{1};   // positive exponent with A = eps * M0^ell
    int eps{1};
    Mat2 K;       // second basis vector of the commuting lattice (first is I)
};

// Saturated basis (I, K) of { X : XA = AX }.
inline Mat2 centralizer_second_basis(const Mat2& A) {
    // kernel of X -> XA - AX, unknowns (x11,x12,x21,x22)
    IntMat sys(4, 4);
    // row for entry (0,0): x11*a11 + x12*a21 - (a11*x11 + a12*x21) = x12*a21 - a12*x21
    sys.at(0, 1) = A.c; sys.at(0, 2) = -A.b;
    // entry (0,1): x11*a12 + x12*a22 - a11*x12 - a12*x22
    sys.at(1, 0) = A.b; sys.at(1, 1) = A.d - A.a; sys.at(1, 3) = -A.b;
    // entry (1,0): x21*a11 + x22*a21 - a21*x11 - a22*x21
    sys.at(2, 0) = -A.c; sys.at(2, 2) = A.a - A.d; sys.at(2, 3) = A.c;
    // entry (1,1): x21*a12 + x22*a22 - a21*x12 - a22*x22
    sys.at(3, 1) = -A.c; sys.at(3, 2) = A.b;

    SmithResult snf = smith_normal_form(sys);
    std::vector<Mat2> kernel;
    for (int j = 0; j < 4; ++j) {
        if (snf.S.at(j, j) != 0) continue;
        kernel.push_back(Mat2{snf.V.at(0, j), snf.V.at(1, j), snf.V.at(2, j), snf.V.at(3, j)});
    }
    check_internal(kernel.size() == 2, "centralizer lattice rank");
    Mat2 K1 = kernel[0], K2 = kernel[1];

    // change basis so the first vector is the identity matrix;
    // solve s1*K1 + s2*K2 = I over Z
    IntMat m(4, 2);
    m.at(0, 0) = K1.a; m.at(0, 1) = K2.a;
    m.at(1, 0) = K1.b; m.at(1, 1) = K2.b;
    m.at(2, 0) = K1.c; m.at(2, 1) = K2.c;
    m.at(3, 0) = K1.d; m.at(3, 1) = K2.d;
    LinearSystemSolution s = solve_integer_system(m, {1, 0, 0, 1});
    check_internal(s.solvable, "identity lies in centralizer lattice");
    Int s1 = s.particular[0], s2 = s.particular[1];
    // extend primitive (s1,s2) to a unimodular matrix (s1 u; s2 w)
    Int g, u, w;
    {
        // extended gcd
        Int a = s1, b = s2, x0 = 1, y0 = 0, x1 = 0, y1 = 1;
        while (b != 0) {
            Int q = a / b, r = a % b;
            a = b; b = r;
            Int nx = x0 - q * x1, ny = y0 - q * y1;
            x0 = x1; y0 = y1; x1 = nx; y1 = ny;
        }
        g = a; u = x0; w = y0;
        if (g < 0) { g = -g; u = -u; w = -w; }
    }
    check_internal(g == 1, "identity primitive in centralizer lattice");
    // basis (I, K) with K = -w*K1 + u*K2 (completes (s1,s2) to det 1)
    Mat2 K = Mat2{-w * K1.a, -w * K1.b, -w * K1.c, -w * K1.d} +
             Mat2{u * K2.a, u * K2.b, u * K2.c, u * K2.d};
    check_internal(K * A == A * K, "K commutes with A");
    return K;
}

// Canonical primitive root per the tie-break: positive exponent for A, then
// positive trace among {M0, -M0}.
inline PrimitiveRootData primitive_root(const Mat2& A, const Int& beta_cap = 1000000) {
    if (!is_anosov(A)) throw NotAnosov("primitive_root: " + A.str());
    Mat2 K = centralizer_second_basis(A);
    Int trK = K.trace(), detK = K.det();
    Int disc = trK * trK - 4 * detK;
    check_internal(disc > 0, "centralizer order is real quadratic");

    // The fundamental unit appears at the minimal beta admitting any unit,
    // but so may its square (golden-ratio orders) or A itself; among the
    // units at that beta the fundamental one has minimal |trace|.
    std::vector<Mat2> units_at_min_beta;
    for (Int beta = 1; beta <= beta_cap && units_at_min_beta.empty(); ++beta) {
        // det(alpha*I + beta*K) = alpha^2 + alpha*beta*trK + beta^2*detK = +-1
        for (int target : {1, -1}) {
            Int delta = beta * beta * disc + 4 * target;
            Int root;
            if (!is_perfect_square(delta, root)) continue;
            for (int pm : {1, -1}) {
                Int num = -beta * trK + pm * root;
                if (num % 2 != 0) continue;
                Int alpha = num / 2;
                Mat2 cand = Mat2::diag(alpha, alpha) + Mat2{beta * K.a, beta * K.b, beta * K.c, beta * K.d};
                if (cand.is_unimodular()) units_at_min_beta.push_back(cand);
            }
        }
    }
    if (units_at_min_beta.empty())
        throw CapExceeded("primitive_root: no unit found with beta <= " + beta_cap.str());
    Mat2 M0 = units_at_min_beta[0];
    for (const Mat2& u : units_at_min_beta)
        if (abs_int(u.trace()) < abs_int(M0.trace())) M0 = u;

    // orient so that A is a positive power, then fix the sign by trace
    auto match_power = [&](const Mat2& R) -> std::optional<Int> {
        long cap = power_match_cap(R, A.max_abs());
        Mat2 p = Mat2::identity();
        for (long j = 1; j <= cap; ++j) {
            p = p * R;
            if (p == A || p == -A) return Int(j);
        }
        return std::nullopt;
    };
    std::optional<Int> ell = match_power(M0);
    if (!ell) {
        M0 = inverse(M0);
        ell = match_power(M0);
    }
    check_internal(ell.has_value(), "A is a power of the fundamental unit");
    if (M0.trace() < 0) M0 = -M0;
    check_internal(M0.trace() != 0, "primitive root has nonzero trace");

    PrimitiveRootData out;
    out.M0 = M0;
    out.ell = *ell;
    out.K = K;
    Mat2 p = power(M0, *ell);
    if (p == A) out.eps = 1;
    else {
        check_internal(p == -A, "A = +-M0^ell");
        out.eps = -1;
    }
    return out;
}

// X in C(A)?  Runs both characterizations (commutation, +-M0 power) and
// insists they agree.
inline bool centralizer_contains(const Mat2& A, const Mat2& X) {
    if (!is_anosov(A)) throw NotAnosov("centralizer_contains: " + A.str());
    bool commutes = (X * A == A * X) && X.is_unimodular();

    PrimitiveRootData root = primitive_root(A);
    bool is_power = decompose_in_root(root.M0, X).has_value();
    check_internal(commutes == is_power, "centralizer membership tests agree");
    return commutes;
}

// ---------------------------------------------------------------------------
// Indefinite binary quadratic forms: deciding whether det(x*B1 + y*B2)
// represents +-1 on an intertwiner lattice.  Classical Gauss reduction with
// transformation tracking; discriminants here are trace^2 - 4det of an
// Anosov matrix, hence positive and never square.
// ---------------------------------------------------------------------------

namespace bqf {

struct Form {
    Int a, b, c;
    bool operator==(const Form&) const = default;
};

inline Int disc(const Form& f) { return f.b * f.b - 4 * f.a * f.c; }

inline bool is_reduced(const Form& f, const Int& sq) {
    // |sqrt(D) - 2|a|| < b < sqrt(D), in exact integer terms with
    // sq = floor(sqrt(D)):  0 < b <= sq  and  sq - b < 2|a| <= sq + b
    // (strictness is safe because D is not a square).
    Int aa = 2 * abs_int(f.a);
    return f.b > 0 && f.b <= sq && sq - f.b < aa && aa <= sq + f.b;
}

// rho step; multiplies the running transform on the right by (0,-1;1,s).
inline Form rho(const Form& f, const Int& sq, Mat2& transform) {
    const Int& c = f.c;
    Int ac = abs_int(c);
    check_internal(c != 0, "rho on degenerate form");
    Int r;
    if (ac > sq) {
        // unique r = -b mod 2|c| in (-|c|, |c|]
        r = fmod(-f.b, 2 * ac);
        if (r > ac) r -= 2 * ac;
    } else {
        // unique r = -b mod 2|c| in (sq - 2|c|, sq]
        r = sq - fmod(sq - (-f.b), 2 * ac);
    }
    Int s = (f.b + r) / (2 * c);
    transform = transform * Mat2{0, -1, 1, s};
    Form g{c, r, (r * r - disc(f)) / (4 * c)};
    return g;
}

// One representation (x,y) with f(x,y) = n, for n in {1,-1}, or nothing.
inline std::optional<Vec2> represent_unit(const Form& f0, int n) {
    Int D = disc(f0);
    check_internal(D > 0, "indefinite form");
    bool exact = false;
    Int sq = isqrt_floor(D, exact);
    check_internal(!exact, "nonsquare discriminant");

    Mat2 T = Mat2::identity();
    Form f = f0;
    if (f.a == n) return Vec2{T.a, T.c};
    int guard = 0;
    while (!is_reduced(f, sq)) {
        f = rho(f, sq, T);
        check_internal(++guard < 10000, "reduction terminates");
        if (f.a == n) return Vec2{T.a, T.c};
    }
    Form start = f;
    do {
        f = rho(f, sq, T);
        if (f.a == n) return Vec2{T.a, T.c};
        check_internal(++guard < 100000, "cycle terminates");
    } while (!(f == start));
    return std::nullopt;
}

} // namespace bqf

// ---------------------------------------------------------------------------
// Intertwiner lattices { P : P*A = B*P } and conjugacy.
// ---------------------------------------------------------------------------

// Basis of the lattice {P : PA = BP}; rank 2 exactly when A and B share the
// characteristic polynomial (and are non-scalar), which is the only case the
// callers feed in.
inline std::vector<Mat2> intertwiner_basis(const Mat2& A, const Mat2& B) {
    IntMat sys(4, 4);
    // entries of P*A - B*P, P = (p,q;r,s), row order (0,0),(0,1),(1,0),(1,1)
    // (0,0): p*Aa + q*Ac - (Ba*p + Bb*r)
    sys.at(0, 0) = A.a - B.a; sys.at(0, 1) = A.c; sys.at(0, 2) = -B.b;
    // (0,1): p*Ab + q*Ad - (Ba*q + Bb*s)
    sys.at(1, 0) = A.b; sys.at(1, 1) = A.d - B.a; sys.at(1, 3) = -B.b;
    // (1,0): r*Aa + s*Ac - (Bc*p + Bd*r)
    sys.at(2, 0) = -B.c; sys.at(2, 2) = A.a - B.d; sys.at(2, 3) = A.c;
    // (1,1): r*Ab + s*Ad - (Bc*q + Bd*s)
    sys.at(3, 1) = -B.c; sys.at(3, 2) = A.b; sys.at(3, 3) = A.d - B.d;

    SmithResult snf = smith_normal_form(sys);
    std::vector<Mat2> basis;
    for (int j = 0; j < 4; ++j) {
        if (snf.S.at(j, j) != 0) continue;
        basis.push_back(Mat2{snf.V.at(0, j), snf.V.at(1, j), snf.V.at(2, j), snf.V.at(3, j)});
    }
    return basis;
}

// Unimodular point of the lattice spanned by basis, i.e. det = target.
inline std::optional<Mat2> unimodular_lattice_point(const std::vector<Mat2>& basis, int target) {
    if (basis.size() != 2) return std::nullopt;
    const Mat2 &B1 = basis[0], &B2 = basis[1];
    Int qa = B1.det();
    Int qc = B2.det();
    Int qb = (B1 + B2).det() - qa - qc;
    bqf::Form f{qa, qb, qc};
    Int D = bqf::disc(f);
    Int rt;
    check_internal(D > 0 && !is_perfect_square(D, rt), "intertwiner form is indefinite nonsquare");
    auto xy = bqf::represent_unit(f, target);
    if (!xy) return std::nullopt;
    Mat2 P{B1.a * xy->x + B2.a * xy->y, B1.b * xy->x + B2.b * xy->y,
           B1.c * xy->x + B2.c * xy->y, B1.d * xy->x + B2.d * xy->y};
    check_internal(P.det() == target, "representation verified");
    return P;
}

// Conjugator P with P*A*P^{-1} = B, or nothing. Both inputs Anosov.
inline std::optional<Mat2> conjugacy_test(const Mat2& A, const Mat2& B) {
    if (!is_anosov(A) || !is_anosov(B)) throw NotAnosov("conjugacy_test");
    if (A.trace() != B.trace() || A.det() != B.det()) return std::nullopt;
    if (A == B) return Mat2::identity();
    std::vector<Mat2> basis = intertwiner_basis(A, B);
    if (basis.size() != 2) return std::nullopt;
    for (int target : {1, -1}) {
        auto P = unimodular_lattice_point(basis, target);
        if (P) {
            check_internal(*P * A == B * *P, "conjugator verified");
            return P;
        }
    }
    return std::nullopt;
}

inline bool homeo_test_torus_bundles(const Mat2& A, const Mat2& B) {
    if (conjugacy_test(A, B)) return true;
    return conjugacy_test(A, inverse(B)).has_value();
}

// ---------------------------------------------------------------------------
// Reversers R(A) = { B : B A B^{-1} = A^{-1} } and the F1/F2/F3 families.
// ---------------------------------------------------------------------------

enum class Family { F1, F2, F3 };

inline std::string family_name(Family f) {
    switch (f) { case Family::F1: return "F1"; case Family::F2: return "F2"; default: return "F3"; }
}

struct ReverserData {
    bool exists{false};
    std::optional<Mat2> witness;
    std::set<Family> families;
    int square_sign{0};  // witness^2 = square_sign * I
    std::map<Family, Mat2> family_witness;  // canonical witness per family present
};

inline Family reverser_family(const Mat2& B) {
    if (B.det() == 1) return Family::F1;
    return mod2(B) == Mat2::identity() ? Family::F2 : Family::F3;
}

inline ReverserData find_reverser(const Mat2& A) {
    if (!is_anosov(A)) throw NotAnosov("find_reverser: " + A.str());
    ReverserData out;
    if (A.det() == -1) {
        // trace(A^{-1}) = -trace(A) != trace(A), so A is not even
        // Q-conjugate to its inverse
        return out;
    }
    std::vector<Mat2> basis = intertwiner_basis(A, inverse(A));
    if (basis.size() != 2) return out;
    std::optional<Mat2> w;
    for (int target : {1, -1}) {
        w = unimodular_lattice_point(basis, target);
        if (w) break;
    }
    if (!w) return out;
    out.exists = true;

    // All reversers are +-w*M0^j; det depends on j mod 2 and the mod-2 class
    // on j mod ord(M0 mod 2), so a window of lcm(2, ord) <= 6 exponents is
    // exhaustive for the family classification.
    PrimitiveRootData root = primitive_root(A);
    int ord2 = 1;
    {
        Mat2 p = mod2(root.M0);
        Mat2 q = p;
        while (!(q == Mat2::identity())) { q = mod2(q * p); ++ord2; check_internal(ord2 <= 6, "mod-2 order"); }
    }
    int window = (2 % ord2 == 0) ? ord2 : ((ord2 % 2 == 0) ? ord2 : 2 * ord2);

    std::vector<Mat2> candidates;
    for (int j = -window; j <= window; ++j) {
        Mat2 r = *w * power(root.M0, j);
        candidates.push_back(r);
        candidates.push_back(-r);
    }
    for (const Mat2& r : candidates) {
        check_internal(r * A == inverse(A) * r, "window element reverses");
        out.families.insert(reverser_family(r));
    }

    // canonical witness: smallest max-entry, then det +1 preferred, then
    // positive upper-left, then lexicographically smallest entry tuple
    auto key = [](const Mat2& m) {
        return std::make_tuple(m.max_abs(), Int(m.det() == 1 ? 0 : 1),
                               Int(m.a <= 0 ? 1 : 0), m.a, m.b, m.c, m.d);
    };
    Mat2 best = candidates[0];
    for (const Mat2& r : candidates)
        if (key(r) < key(best)) best = r;
    out.witness = best;

    Mat2 sq = best * best;
    if (sq == Mat2::identity()) out.square_sign = 1;
    else {
        check_internal(sq == -Mat2::identity(), "reverser squares to +-I");
        out.square_sign = -1;
    }
    check_internal(!(best == -Mat2::identity()), "reverser is not -I");
    return out;
}

inline std::set<Family> family_membership(const Mat2& A) {
    ReverserData rd = find_reverser(A);
    if (!rd.exists) throw NoReverser("family_membership: R(A) empty for " + A.str());
    return rd.families;
}

// ---------------------------------------------------------------------------
// Matrix square roots: X^2 = A has solutions exactly of the shape
// +-(A + I)/sqrt(T+2) or +-(A - I)/sqrt(T-2); each candidate is verified by
// squaring.
// ---------------------------------------------------------------------------

inline std::vector<Mat2> sqrt_matrices(const Mat2& A) {
    if (A == Mat2::identity() || A == -Mat2::identity())
        throw DegenerateInput("sqrt_matrices: +-identity");
    std::vector<Mat2> roots;
    Int T = A.trace();
    for (int s : {1, -1}) {
        Int val = T + 2 * s;
        Int r;
        if (val <= 0 || !is_perfect_square(val, r) || r == 0) continue;
        Mat2 num = (s == 1) ? A + Mat2::identity() : A - Mat2::identity();
        if (num.a % r != 0 || num.b % r != 0 || num.c % r != 0 || num.d % r != 0) continue;
        Mat2 X{num.a / r, num.b / r, num.c / r, num.d / r};
        if (X * X == A) {
            roots.push_back(X);
            roots.push_back(-X);
        }
    }
    return roots;
}

// ---------------------------------------------------------------------------
// Reidemeister-finiteness flag for a reverser pair (A, B).  The products
// B*A*theta^j all square to B^2 * (+-I); an eigenvalue-1 obstruction appears
// exactly when B^2 = I (det B = -1), so the flag is det B = 1.
// ---------------------------------------------------------------------------

inline bool reidemeister_finite_flag(const Mat2& A, const Mat2& B) {
    if (!(B * A == inverse(A) * B) || !B.is_unimodular())
        throw NotAReverser("reidemeister_finite_flag: B is not a reverser of A");
    Mat2 P = B * A;
    Mat2 I = Mat2::identity();
    bool no_obstruction = ((I - P).det() != 0) && ((I + P).det() != 0);
    check_internal(no_obstruction == (B.det() == 1), "obstruction matches det(B)");
    return no_obstruction;
}

} // namespace solaut
