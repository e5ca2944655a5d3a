#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solaut/gl2z.hpp"
#include "solaut/mat2.hpp"

namespace solaut {

// ---------------------------------------------------------------------------
// Word arithmetic in the two polycyclic families:
//
//   torus bundle   E = <d,b,v  | db=bd, vdv^-1 = theta(d), vbv^-1 = theta(b)>
//   sapphire       E = <d,b,v,a| ..., a^2 = d, ab = b^-1 a,
//                                ava^-1 = d^(r-ru-st) b^(s-2su) v^-1>
//
// Every element has the unique normal form d^x b^y v^k a^e (e in {0,1});
// a^2 = d is folded into the x coordinate on multiplication.
// ---------------------------------------------------------------------------

enum class GroupKind { TorusBundle, Sapphire };

struct Elt {
    Vec2 t;       // exponents of d, b
    Int k{0};     // exponent of v
    int e{0};     // exponent of a (always 0 in a torus bundle)
    uint64_t gid{0};

    bool operator==(const Elt&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << "d^" << t.x << " b^" << t.y << " v^" << k;
        if (e) os << " a";
        return os.str();
    }
};

namespace detail {
inline std::atomic<uint64_t>& group_counter() {
    static std::atomic<uint64_t> c{1};
    return c;
}
} // namespace detail

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group : public std::enable_shared_from_this<Group> {
public:
    static GroupPtr torus_bundle(const Mat2& theta) {
        if (!theta.is_unimodular())
            throw NotUnimodular("torus bundle monodromy " + theta.str());
        return GroupPtr(new Group(GroupKind::TorusBundle, theta, Mat2::zero(), Vec2{}));
    }

    // Raw sapphire constructor; the sapphire module performs the full
    // admissibility validation before calling this.  det(B) = ru - st = 1 is
    // required already here: it is exactly the consistency condition
    // (J - theta) w_a = (I - theta) e1 that makes the multiplication law
    // associative.
    static GroupPtr sapphire(const Mat2& B) {
        Int r = B.a, s = B.b, t = B.c, u = B.d;
        if (B.det() != 1)
            throw DetMinusOne("sapphire gluing matrix must have determinant 1, got " +
                              B.det().str() + " for " + B.str());
        Mat2 theta{r * u + s * t, -2 * r * t, -2 * s * u, r * u + s * t};
        if (!theta.is_unimodular())
            throw NotUnimodular("sapphire double cover monodromy " + theta.str());
        Vec2 wa{r - r * u - s * t, s - 2 * s * u};
        return GroupPtr(new Group(GroupKind::Sapphire, theta, B, wa));
    }

    GroupKind kind() const { return kind_; }
    bool is_sapphire() const { return kind_ == GroupKind::Sapphire; }
    const Mat2& theta() const { return theta_; }
    const Mat2& gluing() const { return B_; }
    const Vec2& a_conj_translation() const { return wa_; }
    uint64_t id() const { return id_; }

    Elt elt(const Int& x, const Int& y, const Int& k, int e = 0) const {
        if (e != 0 && !is_sapphire())
            throw GroupMismatch("torus-bundle element with an a-part");
        return Elt{{x, y}, k, e & 1, id_};
    }
    Elt elt(const Vec2& t, const Int& k, int e = 0) const { return elt(t.x, t.y, k, e); }
    Elt identity() const { return elt(0, 0, 0); }
    Elt d() const { return elt(1, 0, 0); }
    Elt b() const { return elt(0, 1, 0); }
    Elt v() const { return elt(0, 0, 1); }
    Elt a() const { return elt(0, 0, 0, 1); }

    Mat2 theta_pow(const Int& k) const { return power(theta_, k); }

    void require_mine(const Elt& g) const {
        if (g.gid != id_) throw GroupMismatch("element belongs to a different group");
    }

    // conjugation by a on the index-2 torus-bundle subgroup:
    // a d a^-1 = d,  a b a^-1 = b^-1,  a v a^-1 = d^wa.x b^wa.y v^-1
    Elt conj_by_a(const Elt& g) const {
        require_mine(g);
        check_internal(g.e == 0, "conj_by_a on a tb-part");
        Elt base = elt(Vec2{g.t.x, -g.t.y}, 0);
        return mul(base, pow(elt(wa_, -1), g.k));
    }

    Elt mul(const Elt& g, const Elt& h) const {
        require_mine(g);
        require_mine(h);
        Elt rhs = h;
        if (g.e == 1) {
            Elt conj = conj_by_a(elt(h.t, h.k));
            rhs = elt(conj.t, conj.k, h.e);
        }
        // combine torus-bundle parts
        Vec2 t = g.t + theta_pow(g.k) * rhs.t;
        Int k = g.k + rhs.k;
        int e = g.e + rhs.e;
        Elt out = elt(t, k, e & 1);
        if (e == 2) out.t = out.t + theta_pow(out.k) * Vec2{1, 0};  // a^2 = d
        return out;
    }

    Elt inv(const Elt& g) const {
        require_mine(g);
        Elt tb_inv = elt(-(theta_pow(-g.k) * g.t), -g.k);
        if (g.e == 0) return tb_inv;
        // (t a)^-1 = d^-1 * c_a(t^-1) * a
        Elt c = conj_by_a(tb_inv);
        Elt out = mul(elt(-1, 0, 0), c);
        return elt(out.t, out.k, 1);
    }

    // g^n by closed form on the torus-bundle part (geometric series of
    // theta^k), binary powering otherwise.
    Elt pow(const Elt& g, const Int& n) const {
        require_mine(g);
        if (n == 0) return identity();
        if (g.e == 0) {
            Elt base = n < 0 ? inv(g) : g;
            Int m = n < 0 ? Int(-n) : n;
            Mat2 step = theta_pow(base.k);
            // S = I + step + ... + step^(m-1), via fast doubling
            Mat2 S = Mat2::zero(), P = Mat2::identity();
            Int bits = m;
            std::vector<bool> stack;
            while (bits > 0) { stack.push_back((bits & 1) != 0); bits >>= 1; }
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                S = S + P * S;      // S_{2j} = S_j + P_j S_j
                P = P * P;
                if (*it) { S = S + P; P = P * step; }  // append one more term
            }
            check_internal(P == power(step, m), "geometric series bookkeeping");
            return elt(S * base.t, base.k * m);
        }
        Elt base = n < 0 ? inv(g) : g;
        Int m = n < 0 ? Int(-n) : n;
        Elt acc = identity();
        Elt sq = base;
        while (m > 0) {
            if ((m & 1) != 0) acc = mul(acc, sq);
            sq = mul(sq, sq);
            m >>= 1;
        }
        return acc;
    }

private:
    Group(GroupKind kind, const Mat2& theta, const Mat2& B, const Vec2& wa)
        : kind_(kind), theta_(theta), B_(B), wa_(wa),
          id_(detail::group_counter().fetch_add(1)) {}

    GroupKind kind_;
    Mat2 theta_;
    Mat2 B_;    // sapphire gluing matrix
    Vec2 wa_;   // translation part of a v a^-1
    uint64_t id_;
};

// ---------------------------------------------------------------------------
// Endomorphisms by generator images.
// ---------------------------------------------------------------------------

struct GenImages {
    Vec2 d, b;  // images of d, b (inside Z+Z, forced by the characteristic subgroup)
    Elt v;      // image of v, must have e = 0
    Elt a;      // image of a (sapphire only), must have e = 1

    Mat2 restriction() const { return Mat2{d.x, b.x, d.y, b.y}; }
};

inline GenImages identity_images(const GroupPtr& G) {
    GenImages im{{1, 0}, {0, 1}, G->v(), G->is_sapphire() ? G->a() : G->identity()};
    return im;
}

inline Elt apply_images(const GroupPtr& G, const GenImages& im, const Elt& g) {
    G->require_mine(g);
    Mat2 N = im.restriction();
    Elt out = G->elt(N * g.t, 0);
    out = G->mul(out, G->pow(im.v, g.k));
    if (g.e) out = G->mul(out, im.a);
    return out;
}

struct EndoCheck {
    bool ok{true};
    std::string failed_relator;
    std::string detail;
};

// Verifies that the defining relations map to relations; reports the first
// violated relator by name.
inline EndoCheck check_endomorphism(const GroupPtr& G, const GenImages& im) {
    if (im.v.e != 0) return {false, "shape", "image of v has an a-part"};
    if (G->is_sapphire() && im.a.e != 1) return {false, "shape", "image of a lacks the a-part"};
    auto ap = [&](const Elt& g) { return apply_images(G, im, g); };
    auto fail = [&](const std::string& rel, const Elt& lhs, const Elt& rhs) {
        return EndoCheck{false, rel, lhs.str() + " != " + rhs.str()};
    };

    const Mat2& th = G->theta();
    {
        Elt lhs = G->mul(G->mul(ap(G->v()), ap(G->d())), G->inv(ap(G->v())));
        Elt rhs = ap(G->elt(th.a, th.c, 0));
        if (!(lhs == rhs)) return fail("v d v^-1 = theta(d)", lhs, rhs);
    }
    {
        Elt lhs = G->mul(G->mul(ap(G->v()), ap(G->b())), G->inv(ap(G->v())));
        Elt rhs = ap(G->elt(th.b, th.d, 0));
        if (!(lhs == rhs)) return fail("v b v^-1 = theta(b)", lhs, rhs);
    }
    if (G->is_sapphire()) {
        {
            Elt lhs = G->mul(ap(G->a()), ap(G->a()));
            Elt rhs = ap(G->d());
            if (!(lhs == rhs)) return fail("a^2 = d", lhs, rhs);
        }
        {
            Elt lhs = G->mul(G->mul(ap(G->a()), ap(G->b())), G->inv(ap(G->a())));
            Elt rhs = ap(G->elt(0, -1, 0));
            if (!(lhs == rhs)) return fail("a b a^-1 = b^-1", lhs, rhs);
        }
        {
            Elt lhs = G->mul(G->mul(ap(G->a()), ap(G->v())), G->inv(ap(G->a())));
            Elt rhs = ap(G->elt(G->a_conj_translation(), -1));
            if (!(lhs == rhs)) return fail("a v a^-1 = d^(r-ru-st) b^(s-2su) v^-1", lhs, rhs);
        }
    }
    return {};
}

// A verified automorphism: generator images plus a verified two-sided
// inverse, never a bare injectivity claim.
class Automorphism {
public:
    Automorphism() = default;

    static Automorphism create(const GroupPtr& G, const GenImages& im) {
        EndoCheck chk = check_endomorphism(G, im);
        if (!chk.ok)
            throw NotEndomorphism("images violate relator [" + chk.failed_relator + "]: " + chk.detail);
        Mat2 N = im.restriction();
        if (!N.is_unimodular())
            throw NotInvertible("restriction matrix " + N.str() + " is not unimodular");
        if (!(im.v.k == 1 || im.v.k == -1))
            throw NotInvertible("image of v does not generate the quotient");

        GenImages inv;
        Mat2 Ninv = solaut::inverse(N);
        inv.d = Ninv * Vec2{1, 0};
        inv.b = Ninv * Vec2{0, 1};
        int sigma = im.v.k == 1 ? 1 : -1;
        if (sigma == 1) inv.v = G->elt(-(Ninv * im.v.t), 1);
        else inv.v = G->elt(Ninv * (G->theta() * im.v.t), -1);
        if (G->is_sapphire()) {
            Int kprime = -sigma * im.a.k;
            Elt U = G->mul(G->pow(im.v, kprime), im.a);
            check_internal(U.k == 0, "inverse a-image grade");
            inv.a = G->elt(-(Ninv * U.t), kprime, 1);
        } else {
            inv.a = G->identity();
        }
        EndoCheck chk2 = check_endomorphism(G, inv);
        if (!chk2.ok)
            throw NotInvertible("inverse images violate [" + chk2.failed_relator + "]");

        Automorphism out;
        out.G_ = G;
        out.fwd_ = im;
        out.bwd_ = inv;
        check_internal(out.composed_is_identity(im, inv) && out.composed_is_identity(inv, im),
                       "two-sided inverse on generators");
        return out;
    }

    const GroupPtr& group() const { return G_; }
    const GenImages& images() const { return fwd_; }
    const GenImages& inverse_images() const { return bwd_; }
    Mat2 restriction() const { return fwd_.restriction(); }
    int quotient_sign() const { return fwd_.v.k == 1 ? 1 : -1; }
    Int k_grade() const { return G_->is_sapphire() ? fwd_.a.k : Int(0); }

    Elt apply(const Elt& g) const { return apply_images(G_, fwd_, g); }
    Elt apply_inverse(const Elt& g) const { return apply_images(G_, bwd_, g); }

    Automorphism inverse() const {
        Automorphism out;
        out.G_ = G_;
        out.fwd_ = bwd_;
        out.bwd_ = fwd_;
        return out;
    }

    bool operator==(const Automorphism& o) const {
        return G_->id() == o.G_->id() && fwd_.d == o.fwd_.d && fwd_.b == o.fwd_.b &&
               fwd_.v == o.fwd_.v && (!G_->is_sapphire() || fwd_.a == o.fwd_.a);
    }

    bool is_identity() const {
        return fwd_.d == Vec2{1, 0} && fwd_.b == Vec2{0, 1} && fwd_.v == G_->v() &&
               (!G_->is_sapphire() || fwd_.a == G_->a());
    }

    std::string str() const {
        std::ostringstream os;
        os << "d -> " << G_->elt(fwd_.d, 0).str() << "; b -> " << G_->elt(fwd_.b, 0).str()
           << "; v -> " << fwd_.v.str();
        if (G_->is_sapphire()) os << "; a -> " << fwd_.a.str();
        return os.str();
    }

private:
    bool composed_is_identity(const GenImages& f, const GenImages& g) const {
        auto comp = [&](const Elt& x) { return apply_images(G_, f, apply_images(G_, g, x)); };
        bool ok = comp(G_->d()) == G_->d() && comp(G_->b()) == G_->b() && comp(G_->v()) == G_->v();
        if (G_->is_sapphire()) ok = ok && comp(G_->a()) == G_->a();
        return ok;
    }

    GroupPtr G_;
    GenImages fwd_, bwd_;
};

inline Automorphism identity_automorphism(const GroupPtr& G) {
    return Automorphism::create(G, identity_images(G));
}

// (phi . psi)(x) = phi(psi(x))
inline Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
    const GroupPtr& G = phi.group();
    if (G->id() != psi.group()->id()) throw GroupMismatch("compose across groups");
    GenImages im;
    im.d = phi.restriction() * psi.images().d;
    im.b = phi.restriction() * psi.images().b;
    im.v = phi.apply(psi.images().v);
    im.a = G->is_sapphire() ? phi.apply(psi.images().a) : G->identity();
    return Automorphism::create(G, im);
}

inline Automorphism invert(const Automorphism& phi) { return phi.inverse(); }

inline Automorphism automorphism_power(const Automorphism& phi, const Int& n) {
    const GroupPtr& G = phi.group();
    Automorphism base = n < 0 ? phi.inverse() : phi;
    Int m = n < 0 ? Int(-n) : n;
    Automorphism acc = identity_automorphism(G);
    Automorphism sq = base;
    while (m > 0) {
        if ((m & 1) != 0) acc = compose(acc, sq);
        if (m > 1) sq = compose(sq, sq);
        m >>= 1;
    }
    return acc;
}

// kappa_g : x -> g x g^-1
inline Automorphism inner(const GroupPtr& G, const Elt& g) {
    G->require_mine(g);
    Elt gi = G->inv(g);
    auto conj = [&](const Elt& x) { return G->mul(G->mul(g, x), gi); };
    GenImages im;
    Elt cd = conj(G->d());
    Elt cb = conj(G->b());
    check_internal(cd.k == 0 && cd.e == 0 && cb.k == 0 && cb.e == 0,
                   "Z+Z is normal");
    im.d = cd.t;
    im.b = cb.t;
    im.v = conj(G->v());
    im.a = G->is_sapphire() ? conj(G->a()) : G->identity();
    return Automorphism::create(G, im);
}

// ---------------------------------------------------------------------------
// Inner recognition: phi = kappa_g . psi for some g?  The translation parts
// of inner automorphisms form the lattice (I - theta)(Z+Z), so membership is
// a Diophantine solve, not a search.
// ---------------------------------------------------------------------------

// Writes X = theta^k, if possible.  Requires Anosov theta (the growth bound
// that makes the exponent window exhaustive).
inline std::optional<Int> theta_power_exponent(const GroupPtr& G, const Mat2& X) {
    const Mat2& th = G->theta();
    check_internal(!is_exceptional(th), "theta power matching needs an Anosov monodromy");
    long cap = power_match_cap(th, X.max_abs());
    Mat2 p = Mat2::identity();
    for (long j = 0; j <= cap; ++j) {
        if (p == X) return Int(j);
        p = p * th;
    }
    Mat2 ti = inverse(th);
    p = ti;
    for (long j = 1; j <= cap; ++j) {
        if (p == X) return Int(-j);
        p = p * ti;
    }
    return std::nullopt;
}

inline std::optional<Elt> inner_witness(const Automorphism& chi_in) {
    const GroupPtr& G = chi_in.group();
    Automorphism chi = chi_in;
    int e = 0;
    if (chi.quotient_sign() == -1) {
        if (!G->is_sapphire()) return std::nullopt;  // Inn acts trivially on the quotient Z
        e = 1;
        chi = compose(chi, inner(G, G->a()).inverse());
    }
    std::optional<Int> k = theta_power_exponent(G, chi.restriction());
    if (!k) return std::nullopt;
    if (G->is_sapphire() && chi.k_grade() != 2 * *k) return std::nullopt;
    Automorphism flat = compose(chi, inner(G, G->elt(0, 0, *k)).inverse());
    check_internal(flat.restriction() == Mat2::identity() && flat.quotient_sign() == 1,
                   "flattened candidate is translation-only");
    Vec2 tr = flat.images().v.t;
    Mat2 lattice = Mat2::identity() - G->theta();
    auto z = solve_exact_2x2(lattice, tr);
    if (!z) return std::nullopt;
    Elt g = G->elt(*z, *k, e);
    Automorphism cand = inner(G, g);
    if (cand == chi_in) return g;
    return std::nullopt;
}

inline std::optional<Elt> equal_mod_inner(const Automorphism& phi, const Automorphism& psi) {
    if (phi.group()->id() != psi.group()->id()) throw GroupMismatch("equal_mod_inner across groups");
    return inner_witness(compose(phi, psi.inverse()));
}

} // namespace solaut
