#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace solaut {

// Exact arbitrary-precision integer. Matrix powers of Anosov matrices grow
// exponentially, so fixed-width arithmetic is never used in the library core.
using Int = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotUnimodular : Error { using Error::Error; };
struct NotAnosov : Error { using Error::Error; };
struct NotSol : Error { using Error::Error; };
struct NoReverser : Error { using Error::Error; };
struct NotAReverser : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct GroupMismatch : Error { using Error::Error; };
struct NotInvertible : Error { using Error::Error; };
struct NotEndomorphism : Error { using Error::Error; };
struct DetMinusOne : Error { using Error::Error; };
struct TorusBundleDegenerate : Error { using Error::Error; };
struct InfiniteTree : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };

// Internal consistency failure: a cross-check that must hold by construction
// did not. Always a bug, never a data error.
struct InternalCheck : Error { using Error::Error; };

inline void check_internal(bool ok, const char* what) {
    if (!ok) throw InternalCheck(std::string("internal check failed: ") + what);
}

inline int sign_of(const Int& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

inline Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

// Floor square root; returns the exact root through `exact`.
inline Int isqrt_floor(const Int& x, bool& exact) {
    if (x < 0) { exact = false; return 0; }
    Int r = boost::multiprecision::sqrt(x);
    exact = (r * r == x);
    return r;
}

inline bool is_perfect_square(const Int& x, Int& root) {
    bool exact = false;
    root = isqrt_floor(x, exact);
    return exact;
}

// Floor division (rounds toward minus infinity, unlike C++ '/').
inline Int fdiv(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int fmod(const Int& a, const Int& b) { return a - fdiv(a, b) * b; }

inline long to_long(const Int& x, const char* ctx = "integer") {
    if (x > std::numeric_limits<long>::max() || x < std::numeric_limits<long>::min())
        throw TooLarge(std::string(ctx) + " does not fit a machine integer");
    return static_cast<long>(x);
}

} // namespace solaut
