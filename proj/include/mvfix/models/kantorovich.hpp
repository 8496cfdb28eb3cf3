#pragma once
// Kantorovich lifting K(d)(p,q) as a transport LP over the two supports.
#include "mvfix/fnexpr.hpp"
#include "mvfix/lp.hpp"

namespace mvfix {

namespace detail {

inline TransportInstance transport_between(const Valuation& d, size_t n, const Distribution& p,
                                           const Distribution& q) {
    TransportInstance t;
    for (auto& [u, x] : p.w) t.p.push_back(x);
    for (auto& [v, y] : q.w) t.q.push_back(y);
    t.cost.assign(p.w.size(), std::vector<Rational>(q.w.size()));
    for (size_t i = 0; i < p.w.size(); ++i)
        for (size_t j = 0; j < q.w.size(); ++j) t.cost[i][j] = d[p.w[i].first * n + q.w[j].first];
    return t;
}

template <class InM>
Mask transport_mask(size_t n, const Distribution& p, const Distribution& q, InM&& in_m) {
    Mask m(p.w.size(), std::vector<bool>(q.w.size()));
    for (size_t i = 0; i < p.w.size(); ++i)
        for (size_t j = 0; j < q.w.size(); ++j) m[i][j] = in_m(p.w[i].first * n + q.w[j].first);
    return m;
}

}  // namespace detail

// d is a valuation over S×S (row-major pair universe), p and q distributions over S.
inline Rational kantorovich(const Valuation& d, size_t n, const Distribution& p, const Distribution& q) {
    auto r = solve_transport(detail::transport_between(d, n, p, q));
    if (r.status != LpStatus::Optimal) throw std::logic_error("kantorovich: transport LP not optimal");
    return r.value;
}

// (p,q) ∈ K_#^d(M): K(d)(p,q) > 0 and some optimal coupling lives on M ∩ [S×S]_d.
inline bool kantorovich_member(const Valuation& d, size_t n, const Subset& m, const Distribution& p,
                               const Distribution& q, const Rational& k) {
    if (k == 0) return false;
    auto t = detail::transport_between(d, n, p, q);
    t.mask = detail::transport_mask(n, p, q, [&](size_t c) { return m.contains(c) && d[c] != 0; });
    auto r = solve_transport(t);
    return r.status == LpStatus::Optimal && r.value == k;
}
inline bool kantorovich_member(const Valuation& d, size_t n, const Subset& m, const Distribution& p,
                               const Distribution& q) {
    return kantorovich_member(d, n, m, p, q, kantorovich(d, n, p, q));
}

}  // namespace mvfix
