#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "solaut/int.hpp"

namespace solaut {

// ---------------------------------------------------------------------------
// Structure trees: explicit iterated (semi)direct products with concrete
// action data.  "H x| Z_2" without its action is ambiguous, so every
// Semidirect/Extension node stores the images of the normal factor's
// generators under conjugation by the actor generator.  Extension nodes
// additionally carry a power word actor^n = w for the non-split cyclic
// extensions this classification produces.
// ---------------------------------------------------------------------------

struct StructureTree;
using TreePtr = std::shared_ptr<const StructureTree>;

// word over a node's generators: (generator index, exponent)*
using GenWord = std::vector<std::pair<int, Int>>;

struct StructureTree {
    enum class Kind { Cyclic, Integers, Lattice, FiniteAbelian, Semidirect, Extension };

    Kind kind{Kind::Cyclic};
    Int cyclic_order{1};                   // Cyclic
    std::vector<Int> invariants;           // FiniteAbelian, n1 | n2 | ...
    TreePtr normal;                        // Semidirect / Extension
    Int actor_order{0};                    // 0 means an integers actor
    std::vector<GenWord> action;           // conjugation images of normal generators
    GenWord power_word;                    // Extension only: actor^actor_order
    std::string actor_name;
    std::vector<std::string> leaf_names;

    static TreePtr cyclic(const Int& n, std::string name) {
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::Cyclic;
        t->cyclic_order = n;
        t->leaf_names = {std::move(name)};
        return t;
    }
    static TreePtr integers(std::string name) {
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::Integers;
        t->leaf_names = {std::move(name)};
        return t;
    }
    static TreePtr lattice(std::string n1, std::string n2) {
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::Lattice;
        t->leaf_names = {std::move(n1), std::move(n2)};
        return t;
    }
    static TreePtr finite_abelian(std::vector<Int> inv, std::vector<std::string> names) {
        check_internal(inv.size() == names.size(), "finite_abelian arity");
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::FiniteAbelian;
        t->invariants = std::move(inv);
        t->leaf_names = std::move(names);
        return t;
    }
    static TreePtr semidirect(TreePtr normal, const Int& actor_order, std::string actor_name,
                              std::vector<GenWord> action) {
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::Semidirect;
        t->normal = std::move(normal);
        t->actor_order = actor_order;
        t->actor_name = std::move(actor_name);
        t->action = std::move(action);
        check_internal(t->action.size() == static_cast<size_t>(t->normal->num_generators()),
                       "action covers the normal generators");
        return t;
    }
    static TreePtr extension(TreePtr normal, const Int& actor_order, std::string actor_name,
                             std::vector<GenWord> action, GenWord power) {
        check_internal(actor_order > 0, "extension actor is finite cyclic");
        auto t = std::make_shared<StructureTree>();
        t->kind = Kind::Extension;
        t->normal = std::move(normal);
        t->actor_order = actor_order;
        t->actor_name = std::move(actor_name);
        t->action = std::move(action);
        t->power_word = std::move(power);
        check_internal(t->action.size() == static_cast<size_t>(t->normal->num_generators()),
                       "action covers the normal generators");
        return t;
    }

    int num_generators() const {
        switch (kind) {
            case Kind::Cyclic:
            case Kind::Integers: return 1;
            case Kind::Lattice: return 2;
            case Kind::FiniteAbelian: return static_cast<int>(invariants.size());
            default: return normal->num_generators() + 1;
        }
    }

    std::vector<std::string> generator_names() const {
        if (kind == Kind::Semidirect || kind == Kind::Extension) {
            auto names = normal->generator_names();
            names.push_back(actor_name);
            return names;
        }
        return leaf_names;
    }

    bool is_finite() const {
        switch (kind) {
            case Kind::Cyclic: return true;
            case Kind::Integers:
            case Kind::Lattice: return false;
            case Kind::FiniteAbelian: {
                for (const Int& n : invariants)
                    if (n == 0) return false;
                return true;
            }
            default: return actor_order > 0 && normal->is_finite();
        }
    }

    // 0 for infinite
    Int order() const {
        switch (kind) {
            case Kind::Cyclic: return cyclic_order;
            case Kind::Integers:
            case Kind::Lattice: return 0;
            case Kind::FiniteAbelian: {
                Int p = 1;
                for (const Int& n : invariants) {
                    if (n == 0) return 0;
                    p *= n;
                }
                return p;
            }
            default: {
                Int sub = normal->order();
                if (sub == 0 || actor_order == 0) return 0;
                return sub * actor_order;
            }
        }
    }

    std::string shape() const {
        switch (kind) {
            case Kind::Cyclic: return "Z_" + cyclic_order.str();
            case Kind::Integers: return "Z";
            case Kind::Lattice: return "Z^2";
            case Kind::FiniteAbelian: {
                if (invariants.empty()) return "1";
                std::string s = "(";
                for (size_t i = 0; i < invariants.size(); ++i) {
                    if (i) s += " + ";
                    s += invariants[i] == 0 ? "Z" : "Z_" + invariants[i].str();
                }
                return s + ")";
            }
            case Kind::Semidirect:
                return "(" + normal->shape() + " ⋊ " +
                       (actor_order == 0 ? "Z" : "Z_" + actor_order.str()) + ")";
            case Kind::Extension:
                return "(" + normal->shape() + " .ext Z_" + actor_order.str() + ")";
        }
        return "?";
    }
};

// ---------------------------------------------------------------------------
// Finite realizations.  Elements are indices 0..order-1; identity is 0.
// ---------------------------------------------------------------------------

class FiniteGroup {
public:
    virtual ~FiniteGroup() = default;
    virtual int64_t order() const = 0;
    virtual int64_t mult(int64_t x, int64_t y) const = 0;
    virtual int64_t inverse(int64_t x) const = 0;
    virtual int num_generators() const = 0;
    virtual int64_t generator(int g) const = 0;
    virtual std::vector<std::string> generator_names() const = 0;

    int64_t identity() const { return 0; }

    int64_t pow(int64_t x, Int e) const {
        if (e < 0) { x = inverse(x); e = -e; }
        int64_t acc = 0, sq = x;
        while (e > 0) {
            if ((e & 1) != 0) acc = mult(acc, sq);
            sq = mult(sq, sq);
            e >>= 1;
        }
        return acc;
    }

    int64_t element_order(int64_t x) const {
        int64_t n = 1, y = x;
        while (y != 0) {
            y = mult(y, x);
            ++n;
            check_internal(n <= order(), "element order bounded by group order");
        }
        return n;
    }

    std::map<int64_t, int64_t> order_histogram() const {
        std::map<int64_t, int64_t> h;
        for (int64_t i = 0; i < order(); ++i) ++h[element_order(i)];
        return h;
    }

    int64_t eval_word(const GenWord& w) const {
        int64_t acc = 0;
        for (const auto& [g, e] : w) acc = mult(acc, pow(generator(g), e));
        return acc;
    }

    // closure of a set under multiplication; the whole group iff the set
    // generates
    std::vector<int64_t> closure(const std::vector<int64_t>& seed) const {
        std::vector<char> seen(static_cast<size_t>(order()), 0);
        std::vector<int64_t> out{0};
        seen[0] = 1;
        for (size_t i = 0; i < out.size(); ++i)
            for (int64_t s : seed) {
                int64_t y = mult(out[i], s);
                if (!seen[static_cast<size_t>(y)]) {
                    seen[static_cast<size_t>(y)] = 1;
                    out.push_back(y);
                }
            }
        return out;
    }
};

// Realization of a finite StructureTree by polycyclic collection.  Every
// Semidirect/Extension node is checked on construction: the action must be a
// verified automorphism of the realized normal factor,
// action^actor_order must equal conjugation by the power word, and the power
// word must be fixed by the action.  These are exactly the cyclic-extension
// consistency conditions, so multiplication is associative by construction
// (and the tests re-check associativity exhaustively on small orders).
class TreeRealization final : public FiniteGroup {
public:
    explicit TreeRealization(const TreePtr& tree, int64_t cap = 4096) : tree_(tree) {
        if (!tree->is_finite()) throw InfiniteTree("realize: " + tree->shape());
        Int n = tree->order();
        if (n > cap) throw TooLarge("realize: order " + n.str() + " exceeds cap");
        build(tree);
        check_internal(order_ == n.convert_to<int64_t>(), "realized order");
    }

    int64_t order() const override { return order_; }
    int64_t mult(int64_t x, int64_t y) const override { return node_mult(levels_.size(), x, y); }
    int64_t inverse(int64_t x) const override { return node_inv(levels_.size(), x); }
    int num_generators() const override { return static_cast<int>(levels_.size()); }
    int64_t generator(int g) const override { return gen_elt_[static_cast<size_t>(g)]; }
    std::vector<std::string> generator_names() const override { return tree_->generator_names(); }

private:
    // level l covers generators 0..l-1 realized as the subgroup of elements
    // with index < block_[l]; level data describes how generator l-1 sits on
    // top of the subgroup below it.
    struct Level {
        int64_t radix;            // order of this cyclic layer
        int64_t power;            // element index (within the sub-block) of gen^radix
        std::vector<int64_t> act; // conjugation by gen, as a permutation of the sub-block
        std::vector<std::vector<int64_t>> act_pow;  // act^e for e in [0, radix)
    };

    TreePtr tree_;
    int64_t order_{1};
    std::vector<Level> levels_;
    std::vector<int64_t> block_;    // block_[l] = order of subgroup of first l levels
    std::vector<int64_t> gen_elt_;

    int64_t sub_size(size_t l) const { return block_[l]; }

    int64_t node_mult(size_t l, int64_t x, int64_t y) const {
        if (l == 0) return 0;
        const Level& L = levels_[l - 1];
        int64_t bs = block_[l - 1];
        int64_t ux = x % bs, ex = x / bs;
        int64_t uy = y % bs, ey = y / bs;
        int64_t conj = L.act_pow[static_cast<size_t>(ex)][static_cast<size_t>(uy)];
        int64_t s = node_mult(l - 1, ux, conj);
        int64_t e = ex + ey;
        if (e >= L.radix) {
            e -= L.radix;
            s = node_mult(l - 1, s, L.power);
        }
        return e * bs + s;
    }

    int64_t node_inv(size_t l, int64_t x) const {
        if (l == 0) return 0;
        const Level& L = levels_[l - 1];
        int64_t bs = block_[l - 1];
        int64_t u = x % bs, e = x / bs;
        if (e == 0) return node_inv(l - 1, u);
        int64_t ep = L.radix - e;
        // (u g^e)^-1 = g^ep * w^-1 * u^-1 = act^ep(w^-1 u^-1) * g^ep
        int64_t wu = node_mult(l - 1, node_inv(l - 1, L.power), node_inv(l - 1, u));
        return ep * bs + L.act_pow[static_cast<size_t>(ep)][static_cast<size_t>(wu)];
    }

    // evaluates a word over the first l levels' generators
    int64_t word_elt(size_t l, const GenWord& w) const {
        int64_t acc = 0;
        for (const auto& [g, e] : w) {
            check_internal(g >= 0 && static_cast<size_t>(g) < l, "word generator in range");
            int64_t ge = gen_elt_[static_cast<size_t>(g)];
            Int ee = e;
            int64_t p;
            {
                int64_t base = ge;
                if (ee < 0) { base = node_inv(l, base); ee = -ee; }
                int64_t a = 0;
                while (ee > 0) {
                    if ((ee & 1) != 0) a = node_mult(l, a, base);
                    base = node_mult(l, base, base);
                    ee >>= 1;
                }
                p = a;
            }
            acc = node_mult(l, acc, p);
        }
        return acc;
    }

    void push_level(const Int& radix_int, const GenWord& power_word,
                    const std::vector<GenWord>& action) {
        size_t l = levels_.size();
        int64_t bs = block_[l];
        int64_t radix = radix_int.convert_to<int64_t>();
        check_internal(radix >= 1, "cyclic layer order positive");

        Level L;
        L.radix = radix;
        L.power = word_elt(l, power_word);

        // permutation of the sub-block induced by the action words
        std::vector<int64_t> gen_img(l);
        for (size_t g = 0; g < l; ++g) gen_img[g] = word_elt(l, action[g]);
        L.act.resize(static_cast<size_t>(bs));
        for (int64_t x = 0; x < bs; ++x) {
            // element x = g_0^e0 ... g_(l-1)^e(l-1), positionally encoded
            int64_t xx = x;
            std::vector<int64_t> exps(l);
            for (size_t g = l; g-- > 0;) {
                exps[g] = xx / block_[g];
                xx %= block_[g];
            }
            int64_t img = 0;
            for (size_t g = 0; g < l; ++g) {
                int64_t sq = gen_img[g], a = 0, e = exps[g];
                while (e > 0) {
                    if (e & 1) a = node_mult(l, a, sq);
                    sq = node_mult(l, sq, sq);
                    e >>= 1;
                }
                img = node_mult(l, img, a);
            }
            L.act[static_cast<size_t>(x)] = img;
        }

        // action is an automorphism of the sub-block
        {
            std::vector<char> seen(static_cast<size_t>(bs), 0);
            for (int64_t x = 0; x < bs; ++x) {
                check_internal(!seen[static_cast<size_t>(L.act[static_cast<size_t>(x)])],
                               "action is injective");
                seen[static_cast<size_t>(L.act[static_cast<size_t>(x)])] = 1;
            }
            for (int64_t x = 0; x < bs; ++x)
                for (size_t g = 0; g < l; ++g) {
                    int64_t y = node_mult(l, x, gen_elt_[g]);
                    check_internal(L.act[static_cast<size_t>(y)] ==
                                       node_mult(l, L.act[static_cast<size_t>(x)], gen_img[g]),
                                   "action is a homomorphism");
                }
        }

        // powers of the action
        L.act_pow.resize(static_cast<size_t>(radix));
        L.act_pow[0].resize(static_cast<size_t>(bs));
        for (int64_t x = 0; x < bs; ++x) L.act_pow[0][static_cast<size_t>(x)] = x;
        for (int64_t e = 1; e < radix; ++e) {
            L.act_pow[static_cast<size_t>(e)].resize(static_cast<size_t>(bs));
            for (int64_t x = 0; x < bs; ++x)
                L.act_pow[static_cast<size_t>(e)][static_cast<size_t>(x)] =
                    L.act[static_cast<size_t>(L.act_pow[static_cast<size_t>(e - 1)][static_cast<size_t>(x)])];
        }

        // cyclic-extension consistency: act^radix = conj by power, act(power) = power
        for (int64_t x = 0; x < bs; ++x) {
            int64_t full = L.act[static_cast<size_t>(
                L.act_pow[static_cast<size_t>(radix - 1)][static_cast<size_t>(x)])];
            int64_t conj = node_mult(l, node_mult(l, L.power, x), node_inv(l, L.power));
            check_internal(full == conj, "act^n equals conjugation by the power word");
        }
        check_internal(L.act[static_cast<size_t>(L.power)] == L.power,
                       "power word fixed by the action");

        levels_.push_back(std::move(L));
        block_.push_back(bs * radix);
        gen_elt_.push_back(bs);  // the new generator is (sub-identity, exponent 1)
        order_ = block_.back();
    }

    void build(const TreePtr& t) {
        block_ = {1};
        build_rec(t);
    }

    std::vector<GenWord> identity_action() const {
        std::vector<GenWord> w;
        for (size_t g = 0; g < levels_.size(); ++g)
            w.push_back(GenWord{{static_cast<int>(g), 1}});
        return w;
    }

    void build_rec(const TreePtr& t) {
        switch (t->kind) {
            case StructureTree::Kind::Cyclic:
                push_level(t->cyclic_order, {}, identity_action());
                return;
            case StructureTree::Kind::FiniteAbelian: {
                for (const Int& n : t->invariants) push_level(n, {}, identity_action());
                return;
            }
            case StructureTree::Kind::Semidirect:
            case StructureTree::Kind::Extension: {
                // trees here are left-nested chains: actors are cyclic and
                // normal factors occupy the lower levels verbatim
                check_internal(levels_.empty(), "left-nested chain");
                build_rec(t->normal);
                check_internal(static_cast<int>(levels_.size()) == t->normal->num_generators(),
                               "normal factor levels");
                push_level(t->actor_order, t->power_word, t->action);
                return;
            }
            default:
                throw InfiniteTree("realize: infinite leaf in " + t->shape());
        }
    }
};

// trivial-action wrapper used when pushing an abelian layer on top of an
// existing chain (identity conjugation on every lower generator)
inline TreePtr trivial_group() { return StructureTree::finite_abelian({}, {}); }

inline std::shared_ptr<TreeRealization> realize(const TreePtr& tree, int64_t cap = 4096) {
    return std::make_shared<TreeRealization>(tree, cap);
}

// Explicit multiplication table (the brute-force oracle's output format).
class TableGroup final : public FiniteGroup {
public:
    TableGroup(std::vector<std::vector<int64_t>> table, std::vector<int64_t> gens,
               std::vector<std::string> gen_names)
        : table_(std::move(table)), gens_(std::move(gens)), names_(std::move(gen_names)) {
        n_ = static_cast<int64_t>(table_.size());
        inv_.assign(static_cast<size_t>(n_), -1);
        for (int64_t i = 0; i < n_; ++i) {
            check_internal(static_cast<int64_t>(table_[static_cast<size_t>(i)].size()) == n_,
                           "square table");
            check_internal(table_[static_cast<size_t>(i)][0] == i && table_[0][static_cast<size_t>(i)] == i,
                           "index 0 is the identity");
            for (int64_t j = 0; j < n_; ++j)
                if (table_[static_cast<size_t>(i)][static_cast<size_t>(j)] == 0) inv_[static_cast<size_t>(i)] = j;
            check_internal(inv_[static_cast<size_t>(i)] >= 0, "inverses exist");
        }
    }

    int64_t order() const override { return n_; }
    int64_t mult(int64_t x, int64_t y) const override {
        return table_[static_cast<size_t>(x)][static_cast<size_t>(y)];
    }
    int64_t inverse(int64_t x) const override { return inv_[static_cast<size_t>(x)]; }
    int num_generators() const override { return static_cast<int>(gens_.size()); }
    int64_t generator(int g) const override { return gens_[static_cast<size_t>(g)]; }
    std::vector<std::string> generator_names() const override { return names_; }

private:
    int64_t n_;
    std::vector<std::vector<int64_t>> table_;
    std::vector<int64_t> inv_;
    std::vector<int64_t> gens_;
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Presentations.
// ---------------------------------------------------------------------------

struct Presentation {
    struct Relator {
        std::string display;  // human-readable "lhs = rhs"
        GenWord word;         // the relator as a word, evaluating to 1
    };
    std::vector<std::string> generators;
    std::vector<Relator> relators;
};

struct PresentationReport {
    bool relators_ok{true};
    std::string failed_relator;
    bool generates{true};
    bool ok() const { return relators_ok && generates; }
};

inline PresentationReport verify_presentation(const Presentation& p, const FiniteGroup& g,
                                              const std::vector<int64_t>& assignment) {
    check_internal(assignment.size() == p.generators.size(), "assignment arity");
    PresentationReport rep;
    for (const auto& rel : p.relators) {
        int64_t acc = 0;
        for (const auto& [gen, e] : rel.word)
            acc = g.mult(acc, g.pow(assignment[static_cast<size_t>(gen)], e));
        if (acc != 0) {
            rep.relators_ok = false;
            rep.failed_relator = rel.display;
            break;
        }
    }
    rep.generates = static_cast<int64_t>(g.closure(assignment).size()) == g.order();
    return rep;
}

// ---------------------------------------------------------------------------
// Isomorphism testing: invariant screening, then backtracking over
// generator images with incremental consistency pruning.  A verification
// convenience with a size cap, not a general-purpose algorithm.
// ---------------------------------------------------------------------------

namespace detail {

// extends the partial map gens -> images to the generated subgroup; empty on
// conflict
inline std::optional<std::vector<int64_t>> extend_generator_map(const FiniteGroup& g1,
                                                                const FiniteGroup& g2,
                                                                const std::vector<int64_t>& gens,
                                                                const std::vector<int64_t>& imgs) {
    std::vector<int64_t> f(static_cast<size_t>(g1.order()), -1);
    f[0] = 0;
    std::vector<int64_t> frontier{0};
    for (size_t i = 0; i < frontier.size(); ++i) {
        int64_t x = frontier[i];
        for (size_t gi = 0; gi < gens.size(); ++gi) {
            int64_t y = g1.mult(x, gens[gi]);
            int64_t fy = g2.mult(f[static_cast<size_t>(x)], imgs[gi]);
            int64_t& slot = f[static_cast<size_t>(y)];
            if (slot == -1) {
                slot = fy;
                frontier.push_back(y);
            } else if (slot != fy) {
                return std::nullopt;
            }
        }
    }
    return f;
}

inline bool map_is_bijection(const std::vector<int64_t>& f, int64_t n) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int64_t v : f) {
        if (v < 0) return false;  // partial: generators did not generate
        if (seen[static_cast<size_t>(v)]) return false;
        seen[static_cast<size_t>(v)] = 1;
    }
    return true;
}

} // namespace detail

// small generating set, greedy by decreasing element order
inline std::vector<int64_t> generating_set(const FiniteGroup& g) {
    std::vector<int64_t> elems(static_cast<size_t>(g.order()));
    for (int64_t i = 0; i < g.order(); ++i) elems[static_cast<size_t>(i)] = i;
    std::stable_sort(elems.begin(), elems.end(), [&](int64_t a, int64_t b) {
        return g.element_order(a) > g.element_order(b);
    });
    std::vector<int64_t> gens;
    size_t closed = 1;
    for (int64_t e : elems) {
        if (e == 0) continue;
        std::vector<int64_t> trial = gens;
        trial.push_back(e);
        size_t c = g.closure(trial).size();
        if (c > closed) {
            gens = std::move(trial);
            closed = c;
            if (closed == static_cast<size_t>(g.order())) break;
        }
    }
    return gens;
}

inline bool isomorphic(const FiniteGroup& g1, const FiniteGroup& g2,
                       const std::vector<int64_t>* hint1 = nullptr,
                       const std::vector<int64_t>* hint2 = nullptr, int64_t cap = 2048) {
    if (g1.order() != g2.order()) return false;
    if (g1.order() > cap) throw TooLarge("isomorphic: order exceeds cap " + std::to_string(cap));
    if (g1.order_histogram() != g2.order_histogram()) return false;

    auto try_map = [&](const std::vector<int64_t>& gens, const std::vector<int64_t>& imgs) {
        auto f = detail::extend_generator_map(g1, g2, gens, imgs);
        return f && detail::map_is_bijection(*f, g2.order());
    };

    if (hint1 && hint2 && hint1->size() == hint2->size() && try_map(*hint1, *hint2)) return true;

    std::vector<int64_t> gens = generating_set(g1);
    std::vector<std::vector<int64_t>> candidates(gens.size());
    for (size_t i = 0; i < gens.size(); ++i) {
        int64_t o = g1.element_order(gens[i]);
        for (int64_t e = 0; e < g2.order(); ++e)
            if (g2.element_order(e) == o) candidates[i].push_back(e);
    }

    std::vector<int64_t> imgs(gens.size(), -1);
    std::function<bool(size_t)> rec = [&](size_t pos) -> bool {
        if (pos == gens.size()) return try_map(gens, imgs);
        std::vector<int64_t> pref_gens(gens.begin(), gens.begin() + static_cast<long>(pos) + 1);
        for (int64_t c : candidates[pos]) {
            imgs[pos] = c;
            std::vector<int64_t> pref_imgs(imgs.begin(), imgs.begin() + static_cast<long>(pos) + 1);
            if (!detail::extend_generator_map(g1, g2, pref_gens, pref_imgs)) continue;
            if (rec(pos + 1)) return true;
        }
        imgs[pos] = -1;
        return false;
    };
    return rec(0);
}

} // namespace solaut
