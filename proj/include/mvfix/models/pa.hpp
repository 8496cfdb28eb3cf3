#pragma once
// Probabilistic automata: the bisimilarity pseudo-metric as μM, self-closed relations,
// and computation of μM from above by coupling improvement plus jumps.
#include <map>
#include <string>
#include <vector>

#include "mvfix/models/hausdorff.hpp"
#include "mvfix/models/kantorovich.hpp"
#include "mvfix/proof.hpp"

namespace mvfix {

struct ProbAutomaton {
    UniversePtr states;
    UniversePtr pairs;
    std::vector<std::string> label;         // ℓ(s)
    std::vector<Distribution> D;            // distinct distributions occurring in the automaton
    std::vector<std::vector<size_t>> eta;   // indices into D
    size_t n() const { return states->size(); }
};

inline ProbAutomaton make_pa(std::vector<std::string> states, const std::map<std::string, std::string>& ell,
                             const std::map<std::string, std::vector<std::map<std::string, Rational>>>& dists) {
    ProbAutomaton pa;
    pa.states = Universe::make(std::move(states));
    pa.pairs = pair_universe(*pa.states);
    pa.label.assign(pa.n(), std::string());
    std::vector<char> labelled(pa.n(), 0);
    for (auto& [s, l] : ell) {
        pa.label[pa.states->at(s)] = l;
        labelled[pa.states->at(s)] = 1;
    }
    for (size_t i = 0; i < pa.n(); ++i)
        if (!labelled[i]) throw PreconditionError("state '" + pa.states->id(i) + "' has no label");
    pa.eta.resize(pa.n());
    for (auto& [s, list] : dists) {
        auto& out = pa.eta[pa.states->at(s)];
        for (auto& row : list) {
            std::vector<std::pair<size_t, Rational>> w;
            for (auto& [t, p] : row) w.emplace_back(pa.states->at(t), p);
            Distribution d = make_distribution(std::move(w));
            auto it = std::find(pa.D.begin(), pa.D.end(), d);
            size_t k = static_cast<size_t>(it - pa.D.begin());
            if (it == pa.D.end()) pa.D.push_back(std::move(d));
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
        std::sort(out.begin(), out.end());
    }
    return pa;
}

namespace detail {

// K(d) on every pair of distributions in D.
inline Matrix kantorovich_table(const ProbAutomaton& pa, const Valuation& d) {
    Matrix k(pa.D.size(), std::vector<Rational>(pa.D.size()));
    for (size_t i = 0; i < pa.D.size(); ++i)
        for (size_t j = 0; j < pa.D.size(); ++j) k[i][j] = kantorovich(d, pa.n(), pa.D[i], pa.D[j]);
    return k;
}

}  // namespace detail

class PaFunction : public FixpointFunction {
public:
    explicit PaFunction(ProbAutomaton pa) : pa_(std::move(pa)) {}
    UniversePtr universe() const override { return pa_.pairs; }
    Chain chain() const override { return Chain::unit(); }

    Valuation eval(const Valuation& d) const override {
        const size_t n = pa_.n();
        Matrix k = detail::kantorovich_table(pa_, d);
        std::vector<Rational> out(n * n);
        for (size_t s = 0; s < n; ++s)
            for (size_t t = 0; t < n; ++t)
                out[s * n + t] = pa_.label[s] != pa_.label[t]
                                     ? Rational(1)
                                     : hausdorff_value(pa_.eta[s], pa_.eta[t], [&](size_t p, size_t q) -> const Rational& { return k[p][q]; });
        return Valuation(pa_.pairs, chain(), std::move(out));
    }

    // M_#^d(Z) = {(s,t) ∈ [S×S]_{M(d)} | ℓ(s) = ℓ(t), (η s, η t) ∈ H_#^{K(d)}(K_#^d(Z))}
    SetFn approx(const Valuation& d, Side side) const override {
        if (side != Side::Dual) throw UnsupportedClosedForm("probabilistic automata: only the dual approximation is provided");
        Matrix k = detail::kantorovich_table(pa_, d);
        Subset cod = support_ceil(eval(d)), dom = support_ceil(d);
        ProbAutomaton pa = pa_;
        return SetFn{pa_.pairs, pa_.pairs, [pa, d, k, cod, dom](const Subset& zs) {
                         const size_t n = pa.n();
                         Subset in = zs & dom, r(pa.pairs);
                         std::map<std::pair<size_t, size_t>, bool> memo;
                         auto in_k = [&](size_t p, size_t q) {
                             auto key = std::make_pair(p, q);
                             auto it = memo.find(key);
                             if (it != memo.end()) return it->second;
                             bool m = kantorovich_member(d, n, in, pa.D[p], pa.D[q], k[p][q]);
                             memo.emplace(key, m);
                             return m;
                         };
                         for (size_t v : cod.elements()) {
                             size_t s = v / n, t = v % n;
                             if (pa.label[s] != pa.label[t]) continue;
                             if (hausdorff_dual_member(pa.eta[s], pa.eta[t], [&](size_t p, size_t q) -> const Rational& { return k[p][q]; }, in_k))
                                 r.insert(v);
                         }
                         return r;
                     }};
    }

    // No closed form: halve from δ^d until the shift on the witness ν M_#^d is a pre-fixpoint.
    // The result is only meaningful for that witness, which is how the jump uses it.
    Rational iota(const Valuation& d, Side side) const override {
        if (side != Side::Dual) throw UnsupportedClosedForm("probabilistic automata: only the dual threshold is provided");
        Subset w = gfp_setfn(approx(d, Side::Dual), support_ceil(d));
        Rational theta = delta_ceil_on(d, w);
        if (w.empty()) return theta;
        for (int i = 0; i < 256; ++i, theta /= 2) {
            Valuation b = d.ominus_on(w, theta);
            if (eval(b).leq(b)) return theta;
        }
        throw std::runtime_error("probabilistic automaton: no decrease threshold found");
    }

    const ProbAutomaton& model() const { return pa_; }

private:
    ProbAutomaton pa_;
};

// Direct clause-by-clause test of the self-closed conditions for relation m w.r.t. the fixpoint d.
inline bool self_closed_check(const ProbAutomaton& pa, const Valuation& d, const Subset& m) {
    const size_t n = pa.n();
    Matrix k = detail::kantorovich_table(pa, d);
    // ∃ c ∈ Ω(p,q), supp(c) ⊆ m, Σ d·c = target: the masked cost range is an interval.
    auto attainable = [&](size_t p, size_t q, const Rational& target) {
        auto t = detail::transport_between(d, n, pa.D[p], pa.D[q]);
        t.mask = detail::transport_mask(n, pa.D[p], pa.D[q], [&](size_t c) { return m.contains(c); });
        auto lo = solve_transport(t, Sense::Min);
        if (lo.status != LpStatus::Optimal) return false;
        auto hi = solve_transport(t, Sense::Max);
        return lo.value <= target && target <= hi.value;
    };
    for (size_t v : m.elements()) {
        size_t s = v / n, t = v % n;
        if (pa.label[s] != pa.label[t] || d[v] <= 0) return false;
        for (int dir = 0; dir < 2; ++dir) {
            const auto& mine = dir == 0 ? pa.eta[s] : pa.eta[t];
            const auto& other = dir == 0 ? pa.eta[t] : pa.eta[s];
            for (size_t x : mine) {
                Rational best = 1;
                for (size_t y : other) best = std::min(best, dir == 0 ? k[x][y] : k[y][x]);
                if (d[v] != best) continue;
                bool ok = false;
                for (size_t y : other)
                    if (dir == 0 ? attainable(x, y, d[v]) : attainable(y, x, d[v])) ok = true;
                if (!ok) return false;
            }
        }
    }
    return true;
}

// ≈_d: greatest fixpoint of M_#^d below [S×S]_d. d must be a fixpoint of M.
inline Subset largest_self_closed(const ProbAutomaton& pa, const Valuation& d) {
    PaFunction f(pa);
    if (!(f.eval(d) == d)) throw PreconditionError("inapplicable: d is not a fixpoint of M");
    return gfp_setfn(f.approx(d, Side::Dual), support_ceil(d));
}

struct PaStats {
    int jumps = 0;
    int inner_solves = 0;
    int coupling_rounds = 0;
};

namespace detail {

// Min's choice for one (pair, side, distribution): the partner distribution and a coupling.
struct CouplingChoice {
    size_t partner = 0;
    Matrix coupling;
};

inline Rational coupling_value(const ProbAutomaton& pa, const Valuation& a, const Distribution& p,
                               const Distribution& q, const Matrix& c) {
    Rational v = 0;
    for (size_t i = 0; i < p.w.size(); ++i)
        for (size_t j = 0; j < q.w.size(); ++j)
            if (c[i][j] != 0) v += c[i][j] * a[p.w[i].first * pa.n() + q.w[j].first];
    return v;
}

class CouplingStrategy {
public:
    explicit CouplingStrategy(const ProbAutomaton& pa) : pa_(pa), left_(pa.n() * pa.n()), right_(pa.n() * pa.n()) {}

    bool sink(size_t v, Rational& value) const {
        size_t s = v / pa_.n(), t = v % pa_.n();
        if (pa_.label[s] != pa_.label[t]) return value = 1, true;
        bool es = pa_.eta[s].empty(), et = pa_.eta[t].empty();
        if (es && et) return value = 0, true;
        if (es || et) return value = 1, true;
        return false;
    }

    // Re-derive optimal couplings against a; keep the current choice unless strictly beaten.
    bool improve(const Valuation& a, bool initial) {
        bool changed = false;
        const size_t n = pa_.n();
        Rational dummy;
        for (size_t v = 0; v < n * n; ++v) {
            if (sink(v, dummy)) continue;
            size_t s = v / n, t = v % n;
            changed |= improve_side(a, pa_.eta[s], pa_.eta[t], false, left_[v], initial);
            changed |= improve_side(a, pa_.eta[t], pa_.eta[s], true, right_[v], initial);
        }
        return changed;
    }

    // μ of M with Min's choices fixed: min Σ x subject to x ≥ every chosen coupling value.
    Valuation least_fixpoint() const {
        const size_t n = pa_.n();
        LinearProgram lp;
        lp.sense = Sense::Min;
        for (size_t v = 0; v < n * n; ++v) lp.add_var(pa_.pairs->id(v), 1, Rational(1));
        for (size_t v = 0; v < n * n; ++v) {
            Rational w;
            if (sink(v, w)) {
                lp.add_row({{v, 1}}, Rel::Eq, w);
                continue;
            }
            size_t s = v / n, t = v % n;
            auto add = [&](const Distribution& p, const Distribution& q, const Matrix& c) {
                std::map<size_t, Rational> row{{v, Rational(1)}};
                for (size_t i = 0; i < p.w.size(); ++i)
                    for (size_t j = 0; j < q.w.size(); ++j)
                        if (c[i][j] != 0) row[p.w[i].first * n + q.w[j].first] -= c[i][j];
                std::vector<std::pair<size_t, Rational>> terms(row.begin(), row.end());
                lp.add_row(std::move(terms), Rel::Ge, 0);
            };
            for (size_t i = 0; i < pa_.eta[s].size(); ++i)
                add(pa_.D[pa_.eta[s][i]], pa_.D[left_[v][i].partner], left_[v][i].coupling);
            for (size_t j = 0; j < pa_.eta[t].size(); ++j)
                add(pa_.D[right_[v][j].partner], pa_.D[pa_.eta[t][j]], right_[v][j].coupling);
        }
        LpResult r = solve_lp(lp);
        if (r.status != LpStatus::Optimal) throw std::logic_error("coupling LP not optimal");
        return Valuation(pa_.pairs, Chain::unit(), std::move(r.x));
    }

private:
    bool improve_side(const Valuation& a, const std::vector<size_t>& mine, const std::vector<size_t>& other,
                      bool flipped, std::vector<CouplingChoice>& choices, bool initial) {
        bool changed = false;
        if (initial) choices.assign(mine.size(), {});
        for (size_t i = 0; i < mine.size(); ++i) {
            std::optional<Rational> best;
            CouplingChoice pick;
            for (size_t y : other) {
                const Distribution& p = pa_.D[flipped ? y : mine[i]];
                const Distribution& q = pa_.D[flipped ? mine[i] : y];
                auto r = solve_transport(transport_between(a, pa_.n(), p, q));
                if (r.status != LpStatus::Optimal) throw std::logic_error("transport LP not optimal");
                if (!best || r.value < *best) {
                    best = r.value;
                    pick = {y, std::move(r.coupling)};
                }
            }
            const Distribution& cp = pa_.D[flipped ? choices[i].partner : mine[i]];
            const Distribution& cq = pa_.D[flipped ? mine[i] : choices[i].partner];
            if (initial || *best < coupling_value(pa_, a, cp, cq, choices[i].coupling)) {
                choices[i] = std::move(pick);
                changed = true;
            }
        }
        return changed;
    }

    const ProbAutomaton& pa_;
    std::vector<std::vector<CouplingChoice>> left_, right_;
};

}  // namespace detail

// A fixpoint of M below the pre-fixpoint b, by improving couplings until none strictly helps.
inline Valuation pa_fixpoint_below(const ProbAutomaton& pa, const Valuation& b, int* rounds = nullptr) {
    detail::CouplingStrategy tau(pa);
    tau.improve(b, true);
    Valuation a = tau.least_fixpoint();
    if (!a.leq(b)) throw std::logic_error("coupling iteration left the pre-fixpoint");
    for (;;) {
        if (rounds) ++*rounds;
        if (!tau.improve(a, false)) return a;
        Valuation next = tau.least_fixpoint();
        if (!next.leq(a)) throw std::logic_error("coupling iteration increased a value");
        a = std::move(next);
    }
}

// μM from the top valuation, jumping off every fixpoint with a non-empty ≈_d.
inline Valuation pa_distance(const ProbAutomaton& pa, PaStats* stats = nullptr) {
    PaFunction f(pa);
    int rounds = 0;
    auto r = extremal_fixpoint_via_jumps(
        f, Valuation::constant(pa.pairs, Chain::unit(), 1),
        [&](const Valuation& b) { return pa_fixpoint_below(pa, b, &rounds); }, Extremum::Least);
    if (stats) *stats = {r.jumps, r.inner_solves, rounds};
    return r.value;
}

}  // namespace mvfix
