#pragma once
// Metric transition systems: J(d)(x1,x2) = max{H(d)(η(x1),η(x2)), |w(x1)-w(x2)|}.
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mvfix/models/hausdorff.hpp"
#include "mvfix/proof.hpp"

namespace mvfix {

struct MetricTS {
    UniversePtr states;
    UniversePtr pairs;
    std::vector<Rational> w;
    std::vector<std::vector<size_t>> succ;

    Rational wbar(size_t a, size_t b) const { return abs(w[a] - w[b]); }
};

inline MetricTS make_mts(std::vector<std::string> states, const std::map<std::string, Rational>& weights,
                         const std::map<std::string, std::vector<std::string>>& succ) {
    MetricTS m;
    m.states = Universe::make(std::move(states));
    m.pairs = pair_universe(*m.states);
    const size_t n = m.states->size();
    m.w.assign(n, Rational(0));
    m.succ.resize(n);
    std::vector<char> has_w(n, 0);
    for (auto& [s, x] : weights) {
        if (x < 0 || x > 1) throw PreconditionError("weight of '" + s + "' outside [0,1]");
        m.w[m.states->at(s)] = x;
        has_w[m.states->at(s)] = 1;
    }
    for (size_t i = 0; i < n; ++i)
        if (!has_w[i]) throw PreconditionError("state '" + m.states->id(i) + "' has no weight");
    for (auto& [s, ts] : succ) {
        auto& out = m.succ[m.states->at(s)];
        for (auto& t : ts) out.push_back(m.states->at(t));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return m;
}

class MtsFunction : public FixpointFunction {
public:
    explicit MtsFunction(MetricTS m) : m_(std::move(m)) {}
    UniversePtr universe() const override { return m_.pairs; }
    Chain chain() const override { return Chain::unit(); }

    Valuation eval(const Valuation& d) const override {
        const size_t n = m_.states->size();
        std::vector<Rational> out(n * n);
        auto dist = [&](size_t a, size_t b) -> const Rational& { return d[a * n + b]; };
        for (size_t a = 0; a < n; ++a)
            for (size_t b = 0; b < n; ++b)
                out[a * n + b] = std::max(hausdorff_value(m_.succ[a], m_.succ[b], dist), m_.wbar(a, b));
        return Valuation(m_.pairs, chain(), std::move(out));
    }

    // J_#^d(Z) = {(x1,x2) ∈ [X×X]_{J(d)} | w̄ < H(d)(η x1, η x2), (η x1, η x2) ∈ H_#^d(Z)}
    SetFn approx(const Valuation& d, Side side) const override {
        if (side != Side::Dual) throw UnsupportedClosedForm("metric transition systems: only the dual approximation is provided");
        Valuation jd = eval(d);
        Subset cod = support_ceil(jd), dom = support_ceil(d);
        MetricTS m = m_;
        return SetFn{m_.pairs, m_.pairs, [m, d, cod, dom](const Subset& zs) {
                         const size_t n = m.states->size();
                         Subset in = zs & dom, r(m.pairs);
                         auto dist = [&](size_t a, size_t b) -> const Rational& { return d[a * n + b]; };
                         auto in_r = [&](size_t a, size_t b) { return in.contains(a * n + b); };
                         for (size_t p : cod.elements()) {
                             size_t a = p / n, b = p % n;
                             Rational h = hausdorff_value(m.succ[a], m.succ[b], dist);
                             if (m.wbar(a, b) < h && hausdorff_dual_member(m.succ[a], m.succ[b], dist, in_r)) r.insert(p);
                         }
                         return r;
                     }};
    }

    // J only takes maxima and minima of entries of d and constants, so any θ below the
    // smallest positive gap among those values (and below δ^d) leaves every extremal set intact.
    Rational iota(const Valuation& d, Side side) const override {
        if (side != Side::Dual) throw UnsupportedClosedForm("metric transition systems: only the dual threshold is provided");
        std::set<Rational> vals(d.values().begin(), d.values().end());
        for (size_t a = 0; a < m_.states->size(); ++a)
            for (size_t b = 0; b < m_.states->size(); ++b) vals.insert(m_.wbar(a, b));
        vals.insert(0);
        vals.insert(1);
        Rational best = delta_ceil(d);
        for (auto it = vals.begin(); std::next(it) != vals.end(); ++it) best = std::min(best, Rational(*std::next(it) - *it));
        return best;
    }

    const MetricTS& model() const { return m_; }

private:
    MetricTS m_;
};

// Descending Kleene iteration from a pre-fixpoint; finite because J only produces values
// already present in d or among the weight distances.
inline Valuation kleene_descend(const FixpointFunction& f, Valuation b, long max_steps = 1000000) {
    for (long i = 0; i < max_steps; ++i) {
        Valuation next = f.eval(b);
        if (next == b) return b;
        b = std::move(next);
    }
    throw std::runtime_error("kleene_descend: no fixpoint within the step limit");
}

// μJ, iterating from the top valuation with jumps.
inline ExtremalResult mts_distance(const MetricTS& m) {
    MtsFunction f(m);
    auto top = Valuation::constant(m.pairs, Chain::unit(), 1);
    return extremal_fixpoint_via_jumps(
        f, top, [&](const Valuation& b) { return kleene_descend(f, b); }, Extremum::Least);
}

}  // namespace mvfix
