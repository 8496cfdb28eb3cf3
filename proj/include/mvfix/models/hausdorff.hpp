#pragma once
// Hausdorff lifting by direct max-min evaluation, and membership in its dual approximation.
#include <cmath>
#include <functional>
#include <vector>

#include "mvfix/mv.hpp"

namespace mvfix {

// H(d)(X1,X2) with min ∅ = top and max ∅ = 0.
template <class Dist>
Rational hausdorff_value(const std::vector<size_t>& x1, const std::vector<size_t>& x2, Dist&& d,
                         const Rational& top = 1) {
    Rational h = 0;
    for (size_t a : x1) {
        Rational m = top;
        for (size_t b : x2) m = std::min(m, Rational(d(a, b)));
        h = std::max(h, m);
    }
    for (size_t b : x2) {
        Rational m = top;
        for (size_t a : x1) m = std::min(m, Rational(d(a, b)));
        h = std::max(h, m);
    }
    return h;
}

// (X1,X2) ∈ H_#^d(R): H > 0 and every point realising H has an R-partner at distance H.
template <class Dist, class InR>
bool hausdorff_dual_member(const std::vector<size_t>& x1, const std::vector<size_t>& x2, Dist&& d, InR&& in_r,
                           const Rational& top = 1) {
    Rational h = hausdorff_value(x1, x2, d, top);
    if (h == 0) return false;
    for (size_t a : x1) {
        Rational m = top;
        for (size_t b : x2) m = std::min(m, Rational(d(a, b)));
        if (m != h) continue;
        bool found = false;
        for (size_t b : x2)
            if (in_r(a, b) && d(a, b) == h) found = true;
        if (!found) return false;
    }
    for (size_t b : x2) {
        Rational m = top;
        for (size_t a : x1) m = std::min(m, Rational(d(a, b)));
        if (m != h) continue;
        bool found = false;
        for (size_t a : x1)
            if (in_r(a, b) && d(a, b) == h) found = true;
        if (!found) return false;
    }
    return true;
}

inline size_t pair_base_size(const Valuation& d) {
    size_t n = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(d.size()))));
    if (n * n != d.size()) throw PreconditionError("distance valuation is not over a pair universe");
    return n;
}

inline Rational hausdorff(const Valuation& d, const std::vector<size_t>& x1, const std::vector<size_t>& x2) {
    size_t n = pair_base_size(d);
    return hausdorff_value(x1, x2, [&](size_t a, size_t b) -> const Rational& { return d[a * n + b]; },
                           d.chain().top());
}

// Membership oracle for H_#^d(R); R is a subset of the pair universe.
inline std::function<bool(const std::vector<size_t>&, const std::vector<size_t>&)> hausdorff_approx_dual(
    const Valuation& d, const Subset& r) {
    size_t n = pair_base_size(d);
    Subset rr = r & support_ceil(d);
    return [d, rr, n](const std::vector<size_t>& x1, const std::vector<size_t>& x2) {
        return hausdorff_dual_member(
            x1, x2, [&](size_t a, size_t b) -> const Rational& { return d[a * n + b]; },
            [&](size_t a, size_t b) { return rr.contains(a * n + b); }, d.chain().top());
    };
}

}  // namespace mvfix
