#pragma once
// Random instance generators and independent reference implementations used by the tests.
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mvfix/corpus.hpp"
#include "mvfix/models/hausdorff.hpp"
#include "mvfix/models/kantorovich.hpp"

namespace oracle {

using namespace mvfix;
using Rng = std::mt19937_64;

inline long rint(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline Rational rand_unit(Rng& rng, long max_den = 6) {
    long den = rint(rng, 1, max_den);
    Rational r(rint(rng, 0, den), den);
    r.canonicalize();
    return r;
}

// k positive rationals summing to 1.
inline std::vector<Rational> rand_dist(Rng& rng, size_t k, long den = 6) {
    std::vector<long> w(k, 1);
    for (long extra = rint(rng, 0, den); extra > 0; --extra) ++w[rint(rng, 0, long(k) - 1)];
    long total = 0;
    for (long x : w) total += x;
    std::vector<Rational> out;
    for (long x : w) {
        Rational r(x, total);
        r.canonicalize();
        out.push_back(r);
    }
    return out;
}

inline std::vector<size_t> rand_subset(Rng& rng, size_t n, size_t lo, size_t hi) {
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(n, size_t(rint(rng, long(lo), long(std::min(hi, n))))));
    std::sort(all.begin(), all.end());
    return all;
}

inline std::vector<std::string> names(const std::string& prefix, size_t n) {
    std::vector<std::string> v;
    for (size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

// ---- exact linear algebra ---------------------------------------------------

// Unique solution of A x = b (A is rows × cols), or nothing if inconsistent or underdetermined.
inline std::optional<std::vector<Rational>> unique_solution(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    size_t rows = a.size(), cols = rows ? a[0].size() : 0, r = 0;
    std::vector<size_t> pivot_col;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) return std::nullopt;  // free column
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[r][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    if (r < cols) return std::nullopt;
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols);
    for (size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i] / a[i][pivot_col[i]];
    return x;
}

// ---- transportation polytope by basis enumeration ---------------------------

// Every vertex of {c ≥ 0 | row sums p, column sums q, c = 0 off mask}.
inline std::vector<Matrix> enumerate_couplings(const std::vector<Rational>& p, const std::vector<Rational>& q,
                                               const std::optional<Mask>& mask = std::nullopt) {
    size_t m = p.size(), n = q.size();
    std::vector<std::pair<size_t, size_t>> cells;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!mask || (*mask)[i][j]) cells.emplace_back(i, j);
    std::set<std::vector<Rational>> seen;
    std::vector<Matrix> out;
    size_t k = cells.size();
    for (unsigned long bits = 0; bits < (1ul << k); ++bits) {
        std::vector<size_t> chosen;
        for (size_t c = 0; c < k; ++c)
            if (bits >> c & 1) chosen.push_back(c);
        if (chosen.size() > m + n - 1) continue;
        std::vector<std::vector<Rational>> a(m + n, std::vector<Rational>(chosen.size()));
        std::vector<Rational> b(m + n);
        for (size_t i = 0; i < m; ++i) b[i] = p[i];
        for (size_t j = 0; j < n; ++j) b[m + j] = q[j];
        for (size_t c = 0; c < chosen.size(); ++c) {
            a[cells[chosen[c]].first][c] = 1;
            a[m + cells[chosen[c]].second][c] = 1;
        }
        auto x = unique_solution(a, b);
        if (!x) continue;
        bool ok = true;
        for (auto& v : *x) ok = ok && v > 0;
        if (!ok) continue;
        Matrix cpl(m, std::vector<Rational>(n));
        std::vector<Rational> flat;
        for (size_t c = 0; c < chosen.size(); ++c) cpl[cells[chosen[c]].first][cells[chosen[c]].second] = (*x)[c];
        for (auto& row : cpl) flat.insert(flat.end(), row.begin(), row.end());
        if (seen.insert(flat).second) out.push_back(cpl);
    }
    return out;
}

inline Rational coupling_cost(const Matrix& c, const Matrix& cost) {
    Rational s = 0;
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < c[i].size(); ++j) s += c[i][j] * cost[i][j];
    return s;
}

// ---- Markov chains ----------------------------------------------------------

inline MarkovChain random_mc(Rng& rng, size_t n) {
    auto ids = names("s", n);
    std::vector<std::string> terminal;
    std::map<std::string, std::map<std::string, Rational>> dist;
    for (size_t s = 0; s < n; ++s) {
        if (rint(rng, 0, 3) == 0) {
            terminal.push_back(ids[s]);
            continue;
        }
        auto succ = rand_subset(rng, n, 1, 3);
        auto w = rand_dist(rng, succ.size());
        for (size_t i = 0; i < succ.size(); ++i) dist[ids[s]][ids[succ[i]]] = w[i];
    }
    return make_markov_chain(ids, terminal, dist);
}

// Fixpoint of T that is c on the states that cannot reach a terminal state; c = 0 gives μT.
inline Valuation mc_fixpoint_with(const MarkovChain& mc, const Rational& c) {
    size_t n = mc.states->size();
    std::vector<char> reach(mc.terminal.begin(), mc.terminal.end());
    for (bool grew = true; grew;) {
        grew = false;
        for (size_t s = 0; s < n; ++s)
            if (!reach[s])
                for (auto& [t, p] : mc.eta[s].w)
                    if (reach[t] && !reach[s]) reach[s] = grew = true;
    }
    std::vector<size_t> idx(n, n), live;
    for (size_t s = 0; s < n; ++s)
        if (reach[s] && !mc.terminal[s]) {
            idx[s] = live.size();
            live.push_back(s);
        }
    std::vector<std::vector<Rational>> a(live.size(), std::vector<Rational>(live.size()));
    std::vector<Rational> b(live.size());
    for (size_t i = 0; i < live.size(); ++i) {
        a[i][i] += 1;
        for (auto& [t, p] : mc.eta[live[i]].w) {
            if (mc.terminal[t]) b[i] += p;
            else if (!reach[t]) b[i] += p * c;
            else a[i][idx[t]] -= p;
        }
    }
    auto x = unique_solution(a, b);
    if (!x) throw std::logic_error("mc oracle: singular system");
    std::vector<Rational> v(n);
    for (size_t s = 0; s < n; ++s) v[s] = mc.terminal[s] ? Rational(1) : !reach[s] ? c : (*x)[idx[s]];
    return Valuation(mc.states, Chain::unit(), v);
}

inline bool has_nonterminating_states(const MarkovChain& mc) {
    return !(mc_fixpoint_with(mc, 1) == mc_fixpoint_with(mc, 0));
}

// ---- definitional approximations --------------------------------------------

// {z ∈ support of f(a) | the shifted input moves f by at least δ at z}
inline Subset definitional_approx(const std::function<Valuation(const Valuation&)>& f, const Valuation& a,
                                  const Rational& delta, const Subset& ys, Side side) {
    const Chain& ch = a.chain();
    std::vector<Rational> shifted(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        shifted[i] = a[i];
        if (ys.contains(i)) shifted[i] = side == Side::Primal ? std::min(Rational(a[i] + delta), ch.top())
                                                               : std::max(Rational(a[i] - delta), Rational(0));
    }
    Valuation fa = f(a), fb = f(Valuation(a.universe(), ch, shifted));
    Subset out(fa.universe());
    for (size_t z = 0; z < fa.size(); ++z) {
        if (side == Side::Primal && fa[z] != ch.top() && fb[z] - fa[z] >= delta) out.insert(z);
        if (side == Side::Dual && fa[z] != 0 && fa[z] - fb[z] >= delta) out.insert(z);
    }
    return out;
}

inline std::vector<Subset> all_subsets(const Subset& top) {
    auto el = top.elements();
    std::vector<Subset> out;
    for (unsigned long bits = 0; bits < (1ul << el.size()); ++bits) {
        Subset s(top.universe());
        for (size_t i = 0; i < el.size(); ++i)
            if (bits >> i & 1) s.insert(el[i]);
        out.push_back(s);
    }
    return out;
}

// ---- random toolbox expressions ---------------------------------------------

class ExprGen {
public:
    ExprGen(Rng& rng, Chain chain) : rng_(rng), chain_(chain) {}

    UniversePtr universe(size_t n) { return Universe::make(names("u" + std::to_string(counter_++) + "_", n)); }

    FnPtr build(const UniversePtr& dom, int depth) {
        long pick = rint(rng_, 0, depth > 0 ? 6 : 4);
        UniversePtr cod = universe(size_t(rint(rng_, 1, 4)));
        switch (pick) {
            case 0: return fn::constant(dom, random_valuation(cod, chain_, rng_, 6));
            case 1: {
                std::vector<size_t> u(cod->size());
                for (auto& x : u) x = size_t(rint(rng_, 0, long(dom->size()) - 1));
                return fn::reindex(dom, cod, chain_, u);
            }
            case 2:
            case 3: {
                std::vector<std::vector<size_t>> rel(cod->size());
                for (auto& r : rel) r = rand_subset(rng_, dom->size(), rint(rng_, 0, 5) == 0 ? 0 : 1, 3);
                return pick == 2 ? fn::min_rel(dom, cod, chain_, rel) : fn::max_rel(dom, cod, chain_, rel);
            }
            case 4: {
                if (chain_.kind != ChainKind::Unit) return build(dom, 0);
                std::vector<Distribution> ds;
                for (size_t z = 0; z < cod->size(); ++z) {
                    auto supp = rand_subset(rng_, dom->size(), 1, 3);
                    auto w = rand_dist(rng_, supp.size(), 4);
                    std::vector<std::pair<size_t, Rational>> pw;
                    for (size_t i = 0; i < supp.size(); ++i) pw.emplace_back(supp[i], w[i]);
                    ds.push_back(make_distribution(pw));
                }
                return fn::average(dom, cod, chain_, ds);
            }
            case 5: {
                FnPtr inner = build(dom, depth - 1);
                return fn::compose(build(inner->cod, depth - 1), inner);
            }
            default: {
                // dom splits into two parts, each mapped by its own expression
                if (dom->size() < 2) return build(dom, depth - 1);
                size_t cut = size_t(rint(rng_, 1, long(dom->size()) - 1));
                UniversePtr d1 = universe(cut), d2 = universe(dom->size() - cut);
                FnPtr f1 = build(d1, depth - 1), f2 = build(d2, depth - 1);
                size_t c1 = f1->cod->size(), c2 = f2->cod->size();
                UniversePtr outer_cod = universe(c1 + c2);
                std::vector<size_t> dm1(cut), dm2(dom->size() - cut), cm1(c1), cm2(c2);
                for (size_t i = 0; i < cut; ++i) dm1[i] = i;
                for (size_t i = 0; i < dm2.size(); ++i) dm2[i] = cut + i;
                for (size_t i = 0; i < c1; ++i) cm1[i] = i;
                for (size_t i = 0; i < c2; ++i) cm2[i] = c1 + i;
                return fn::disjoint_union(dom, outer_cod, {UnionPart{f1, dm1, cm1}, UnionPart{f2, dm2, cm2}});
            }
        }
    }

private:
    Rng& rng_;
    Chain chain_;
    int counter_ = 0;
};

// ---- games ------------------------------------------------------------------

inline Ssg random_ssg(Rng& rng, size_t max_nodes = 6, size_t max_out = 3) {
    size_t n = size_t(rint(rng, 2, long(max_nodes)));
    auto ids = names("v", n);
    std::vector<SsgNode> spec;
    size_t sinks = size_t(rint(rng, 1, std::max<long>(1, long(n) / 2)));
    for (size_t v = 0; v < n; ++v) {
        SsgNode s{ids[v], NodeKind::Sink, {}, {}, 0};
        if (v < sinks) {
            s.weight = rand_unit(rng, 4);
        } else {
            long k = rint(rng, 0, 2);
            auto succ = rand_subset(rng, n, 1, max_out);
            if (k == 2) {
                s.kind = NodeKind::Av;
                auto w = rand_dist(rng, succ.size(), 4);
                for (size_t i = 0; i < succ.size(); ++i) s.dist[ids[succ[i]]] = w[i];
            } else {
                s.kind = k == 0 ? NodeKind::Min : NodeKind::Max;
                for (size_t t : succ) s.succ.push_back(ids[t]);
            }
        }
        spec.push_back(std::move(s));
    }
    std::shuffle(spec.begin(), spec.end(), rng);
    return make_ssg(spec);
}

// ---- transition systems -----------------------------------------------------

inline TransitionSystem random_ts(Rng& rng, size_t n) {
    auto ids = names("s", n);
    std::map<std::string, std::vector<std::string>> succ;
    for (size_t s = 0; s < n; ++s)
        for (size_t t : rand_subset(rng, n, 0, 2)) succ[ids[s]].push_back(ids[t]);
    return make_ts(ids, succ);
}

// Naive partition refinement; bisim[s][t].
inline std::vector<std::vector<char>> bisimilarity(const TransitionSystem& ts) {
    size_t n = ts.states->size();
    std::vector<std::vector<char>> r(n, std::vector<char>(n, 1));
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t s = 0; s < n; ++s)
            for (size_t t = 0; t < n; ++t) {
                if (!r[s][t]) continue;
                auto covered = [&](size_t a, size_t b) {
                    for (size_t x : ts.succ[a]) {
                        bool ok = false;
                        for (size_t y : ts.succ[b]) ok = ok || r[x][y];
                        if (!ok) return false;
                    }
                    return true;
                };
                if (!covered(s, t) || !covered(t, s)) r[s][t] = 0, changed = true;
            }
    }
    return r;
}

// ---- metric transition systems ----------------------------------------------

inline MetricTS random_mts(Rng& rng, size_t n) {
    auto ids = names("s", n);
    std::map<std::string, Rational> w;
    std::map<std::string, std::vector<std::string>> succ;
    for (size_t s = 0; s < n; ++s) {
        w[ids[s]] = rand_unit(rng, 5);
        for (size_t t : rand_subset(rng, n, 0, 3)) succ[ids[s]].push_back(ids[t]);
    }
    return make_mts(ids, w, succ);
}

// J(d)(s,t) = max(|w s − w t|, Hausdorff of d between the successor sets), written out directly.
inline Valuation mts_step(const MetricTS& m, const Valuation& d) {
    size_t n = m.states->size();
    std::vector<Rational> out(n * n);
    for (size_t s = 0; s < n; ++s)
        for (size_t t = 0; t < n; ++t) {
            Rational h = 0;
            for (int side = 0; side < 2; ++side) {
                const auto& xs = side ? m.succ[t] : m.succ[s];
                const auto& ys = side ? m.succ[s] : m.succ[t];
                for (size_t x : xs) {
                    Rational best = 1;
                    for (size_t y : ys) best = std::min(best, side ? d[y * n + x] : d[x * n + y]);
                    h = std::max(h, best);
                }
            }
            Rational wd = m.w[s] - m.w[t];
            out[s * n + t] = std::max(h, Rational(abs(wd)));
        }
    return Valuation(m.pairs, Chain::unit(), out);
}

// Ascending Kleene from 0; the values stay in a finite set, so this stops.
inline Valuation mts_least_by_kleene(const MetricTS& m) {
    Valuation d = Valuation::constant(m.pairs, Chain::unit(), 0);
    for (;;) {
        Valuation e = mts_step(m, d);
        if (e == d) return d;
        d = e;
    }
}

// ---- probabilistic automata -------------------------------------------------

inline ProbAutomaton random_pa(Rng& rng, size_t n, size_t labels = 2) {
    auto ids = names("s", n);
    std::map<std::string, std::string> ell;
    std::map<std::string, std::vector<std::map<std::string, Rational>>> dists;
    for (size_t s = 0; s < n; ++s) {
        ell[ids[s]] = std::string(1, char('a' + rint(rng, 0, long(labels) - 1)));
        for (long k = rint(rng, 0, 2); k > 0; --k) {
            auto supp = rand_subset(rng, n, 1, 3);
            auto w = rand_dist(rng, supp.size(), 3);
            std::map<std::string, Rational> d;
            for (size_t i = 0; i < supp.size(); ++i) d[ids[supp[i]]] = w[i];
            dists[ids[s]].push_back(d);
        }
    }
    return make_pa(ids, ell, dists);
}

// μM as the value of a game: Max picks a side and a distribution, Min a partner and a coupling vertex,
// and the coupling is played as an average over pairs.
inline Valuation pa_least_via_game(const ProbAutomaton& pa) {
    size_t n = pa.n();
    std::vector<SsgNode> spec;
    auto pid = [&](size_t s, size_t t) { return "p" + std::to_string(s) + "_" + std::to_string(t); };
    spec.push_back({"one", NodeKind::Sink, {}, {}, 1});
    spec.push_back({"zero", NodeKind::Sink, {}, {}, 0});
    int fresh = 0;
    auto name = [&](const std::string& k) { return k + std::to_string(fresh++); };
    for (size_t s = 0; s < n; ++s)
        for (size_t t = 0; t < n; ++t) {
            SsgNode node{pid(s, t), NodeKind::Max, {}, {}, 0};
            if (pa.label[s] != pa.label[t]) {
                node.succ = {"one"};
            } else if (pa.eta[s].empty() && pa.eta[t].empty()) {
                node.succ = {"zero"};
            } else if (pa.eta[s].empty() || pa.eta[t].empty()) {
                node.succ = {"one"};
            } else {
                for (int side = 0; side < 2; ++side) {
                    const auto& mine = side ? pa.eta[t] : pa.eta[s];
                    const auto& other = side ? pa.eta[s] : pa.eta[t];
                    for (size_t x : mine) {
                        SsgNode pick{name("m"), NodeKind::Min, {}, {}, 0};
                        for (size_t y : other) {
                            const Distribution& p = pa.D[side ? y : x];
                            const Distribution& q = pa.D[side ? x : y];
                            std::vector<Rational> pv, qv;
                            for (auto& [i, w] : p.w) pv.push_back(w);
                            for (auto& [j, w] : q.w) qv.push_back(w);
                            for (const Matrix& c : enumerate_couplings(pv, qv)) {
                                SsgNode av{name("c"), NodeKind::Av, {}, {}, 0};
                                for (size_t i = 0; i < c.size(); ++i)
                                    for (size_t j = 0; j < c[i].size(); ++j)
                                        if (c[i][j] > 0) av.dist[pid(p.w[i].first, q.w[j].first)] += c[i][j];
                                pick.succ.push_back(av.id);
                                spec.push_back(std::move(av));
                            }
                        }
                        node.succ.push_back(pick.id);
                        spec.push_back(std::move(pick));
                    }
                }
            }
            spec.push_back(std::move(node));
        }
    Ssg g = make_ssg(spec);
    Valuation v = strategy_iteration_below(g).values;
    std::vector<Rational> out(n * n);
    for (size_t s = 0; s < n; ++s)
        for (size_t t = 0; t < n; ++t) out[s * n + t] = v[g.nodes->at(pid(s, t))];
    return Valuation(pa.pairs, Chain::unit(), out);
}

}  // namespace oracle
