#pragma once
// Bisimilarity as the greatest fixpoint of B = (η×η)* ∘ G over {0,1}, and non-bisimilarity witnesses.
#include <map>
#include <string>
#include <vector>

#include "mvfix/proof.hpp"

namespace mvfix {

struct TransitionSystem {
    UniversePtr states;
    UniversePtr pairs;
    std::vector<std::vector<size_t>> succ;
};

inline TransitionSystem make_ts(std::vector<std::string> states,
                                const std::map<std::string, std::vector<std::string>>& succ) {
    TransitionSystem ts;
    ts.states = Universe::make(std::move(states));
    ts.pairs = pair_universe(*ts.states);
    ts.succ.resize(ts.states->size());
    for (auto& [s, out] : succ) {
        auto& v = ts.succ[ts.states->at(s)];
        for (auto& t : out) v.push_back(ts.states->at(t));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return ts;
}

class BisimFunction : public FixpointFunction {
public:
    explicit BisimFunction(TransitionSystem ts) : ts_(std::move(ts)) {}
    UniversePtr universe() const override { return ts_.pairs; }
    Chain chain() const override { return Chain::boolean(); }

    Valuation eval(const Valuation& a) const override {
        const size_t n = ts_.states->size();
        std::vector<Rational> out(n * n);
        for (size_t x1 = 0; x1 < n; ++x1)
            for (size_t x2 = 0; x2 < n; ++x2)
                out[x1 * n + x2] = matched(x1, x2, [&](size_t y1, size_t y2) { return a[y1 * n + y2] == 1; }) ? 1 : 0;
        return Valuation(ts_.pairs, chain(), std::move(out));
    }

    // B_a^#(R): pairs in [X×X]^{B(a)} whose successors are matched by pairs outside [X×X]^a or inside R.
    SetFn approx(const Valuation& a, Side side) const override {
        if (side != Side::Primal) throw UnsupportedClosedForm("bisimilarity: only the primal approximation is provided");
        Subset cod = support_floor(eval(a)), dom = support_floor(a);
        auto self = *this;
        return SetFn{ts_.pairs, ts_.pairs, [self, cod, dom](const Subset& rs) {
                         const size_t n = self.ts_.states->size();
                         Subset in = rs & dom, r(self.ts_.pairs);
                         for (size_t p : cod.elements())
                             if (self.matched(p / n, p % n, [&](size_t y1, size_t y2) {
                                     size_t q = y1 * n + y2;
                                     return !dom.contains(q) || in.contains(q);
                                 }))
                                 r.insert(p);
                         return r;
                     }};
    }
    Rational iota(const Valuation& a, Side side) const override {
        if (side != Side::Primal) throw UnsupportedClosedForm("bisimilarity: only the primal threshold is provided");
        return delta_floor(a);
    }

    const TransitionSystem& model() const { return ts_; }

private:
    template <class Ok>
    bool matched(size_t x1, size_t x2, Ok&& ok) const {
        for (size_t y1 : ts_.succ[x1]) {
            bool f = false;
            for (size_t y2 : ts_.succ[x2]) f = f || ok(y1, y2);
            if (!f) return false;
        }
        for (size_t y2 : ts_.succ[x2]) {
            bool f = false;
            for (size_t y1 : ts_.succ[x1]) f = f || ok(y1, y2);
            if (!f) return false;
        }
        return true;
    }

    TransitionSystem ts_;
};

// Certified means the pair is not bisimilar.
inline Certificate witness_nonbisim(const TransitionSystem& ts, const Valuation& a, const std::string& x1,
                                    const std::string& x2) {
    BisimFunction b(ts);
    size_t p = ts.pairs->at(x1 + "," + x2);
    if (a[p] != 0) return detail::inapplicable(ts.pairs, "a(" + x1 + "," + x2 + ") must be 0");
    Valuation ba = b.eval(a);
    for (size_t q = 0; q < a.size(); ++q)
        if (ba[q] > a[q]) return detail::inapplicable(ts.pairs, "not a pre-fixpoint at (" + ts.pairs->id(q) + ")");
    return certify_upper_bound(b, a);
}

}  // namespace mvfix
