#pragma once
// Simple stochastic games: value function V, strategy iteration from above (with jumps)
// and from below, a floating-point Kleene baseline and an exhaustive oracle.
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "mvfix/linsolve.hpp"
#include "mvfix/lp.hpp"
#include "mvfix/proof.hpp"

namespace mvfix {

enum class NodeKind { Min, Max, Av, Sink };

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Min: return "min";
        case NodeKind::Max: return "max";
        case NodeKind::Av: return "av";
        case NodeKind::Sink: return "sink";
    }
    return "?";
}

struct Ssg {
    UniversePtr nodes;
    std::vector<NodeKind> kind;
    std::vector<std::vector<size_t>> succ;  // MIN/MAX, sorted
    std::vector<Distribution> dist;         // AV
    std::vector<Rational> w;                // SINK
    size_t size() const { return kind.size(); }
};

struct SsgNode {
    std::string id;
    NodeKind kind;
    std::vector<std::string> succ;
    std::map<std::string, Rational> dist;
    Rational weight;
};

inline Ssg make_ssg(const std::vector<SsgNode>& spec) {
    Ssg g;
    std::vector<std::string> ids;
    for (auto& n : spec) ids.push_back(n.id);
    g.nodes = Universe::make(std::move(ids));
    const size_t n = g.nodes->size();
    g.kind.resize(n);
    g.succ.resize(n);
    g.dist.resize(n);
    g.w.assign(n, Rational(0));
    for (size_t v = 0; v < n; ++v) {
        const auto& s = spec[v];
        g.kind[v] = s.kind;
        switch (s.kind) {
            case NodeKind::Min:
            case NodeKind::Max:
                if (s.succ.empty()) throw PreconditionError("node '" + s.id + "' has no successors");
                for (auto& t : s.succ) g.succ[v].push_back(g.nodes->at(t));
                std::sort(g.succ[v].begin(), g.succ[v].end());
                g.succ[v].erase(std::unique(g.succ[v].begin(), g.succ[v].end()), g.succ[v].end());
                break;
            case NodeKind::Av: {
                std::vector<std::pair<size_t, Rational>> w;
                for (auto& [t, p] : s.dist) w.emplace_back(g.nodes->at(t), p);
                g.dist[v] = make_distribution(std::move(w));
                break;
            }
            case NodeKind::Sink:
                if (s.weight < 0 || s.weight > 1) throw PreconditionError("sink '" + s.id + "' weight outside [0,1]");
                g.w[v] = s.weight;
                break;
        }
    }
    return g;
}

// Positional strategy of one player; choice[v] is only meaningful on the owner's nodes.
struct Strategy {
    NodeKind owner = NodeKind::Min;
    std::vector<size_t> choice;
    bool operator==(const Strategy&) const = default;
};

inline Strategy initial_strategy(const Ssg& g, NodeKind owner) {
    Strategy s{owner, std::vector<size_t>(g.size(), 0)};
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == owner) s.choice[v] = g.succ[v].front();
    return s;
}

inline Strategy random_strategy(const Ssg& g, NodeKind owner, std::mt19937_64& rng) {
    Strategy s = initial_strategy(g, owner);
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == owner) {
            std::uniform_int_distribution<size_t> pick(0, g.succ[v].size() - 1);
            s.choice[v] = g.succ[v][pick(rng)];
        }
    return s;
}

inline void check_strategy(const Ssg& g, const Strategy& s) {
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == s.owner && !std::binary_search(g.succ[v].begin(), g.succ[v].end(), s.choice[v]))
            throw PreconditionError("strategy picks a non-successor at '" + g.nodes->id(v) + "'");
}

// V = (η_min* ∘ min_∈) ⊎ (η_max* ∘ max_∈) ⊎ (η_av* ∘ av_D) ⊎ c_w
inline FnPtr value_fn(const Ssg& g) {
    const Chain ch = Chain::unit();
    std::vector<size_t> identity(g.size());
    for (size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    std::vector<UnionPart> parts;
    auto nodes_of = [&](NodeKind k) {
        std::vector<size_t> out;
        for (size_t v = 0; v < g.size(); ++v)
            if (g.kind[v] == k) out.push_back(v);
        return out;
    };
    auto sub = [&](const std::vector<size_t>& vs) {
        std::vector<std::string> ids;
        for (size_t v : vs) ids.push_back(g.nodes->id(v));
        return Universe::make(std::move(ids));
    };
    for (NodeKind k : {NodeKind::Min, NodeKind::Max}) {
        auto vs = nodes_of(k);
        if (vs.empty()) continue;
        std::vector<std::vector<size_t>> rel;
        for (size_t v : vs) rel.push_back(g.succ[v]);
        auto f = k == NodeKind::Min ? fn::min_rel(g.nodes, sub(vs), ch, rel) : fn::max_rel(g.nodes, sub(vs), ch, rel);
        parts.push_back({f, identity, vs});
    }
    if (auto vs = nodes_of(NodeKind::Av); !vs.empty()) {
        std::vector<Distribution> ds;
        for (size_t v : vs) ds.push_back(g.dist[v]);
        parts.push_back({fn::average(g.nodes, sub(vs), ch, ds), identity, vs});
    }
    if (auto vs = nodes_of(NodeKind::Sink); !vs.empty()) {
        std::vector<Rational> ws;
        for (size_t v : vs) ws.push_back(g.w[v]);
        parts.push_back({fn::constant(g.nodes, Valuation(sub(vs), ch, ws)), identity, vs});
    }
    return fn::disjoint_union(g.nodes, g.nodes, std::move(parts));
}

// V, V_τ (Min fixed) or V_σ (Max fixed) evaluated directly.
inline Valuation eval_game(const Ssg& g, const Valuation& a, const Strategy* fixed = nullptr) {
    std::vector<Rational> out(g.size());
    for (size_t v = 0; v < g.size(); ++v) {
        switch (g.kind[v]) {
            case NodeKind::Min:
            case NodeKind::Max:
                if (fixed && fixed->owner == g.kind[v]) {
                    out[v] = a[fixed->choice[v]];
                } else {
                    out[v] = a[g.succ[v][0]];
                    for (size_t t : g.succ[v]) out[v] = g.kind[v] == NodeKind::Min ? std::min(out[v], a[t]) : std::max(out[v], a[t]);
                }
                break;
            case NodeKind::Av:
                for (auto& [t, p] : g.dist[v].w) out[v] += p * a[t];
                break;
            case NodeKind::Sink: out[v] = g.w[v]; break;
        }
    }
    return Valuation(g.nodes, Chain::unit(), std::move(out));
}

// V_#^a: MIN needs some minimising successor in V', MAX all maximising ones, AV the whole support.
inline SetFn value_approx_dual(const Ssg& g, const Valuation& a) {
    Subset cod = support_ceil(eval_game(g, a)), dom = support_ceil(a);
    return SetFn{g.nodes, g.nodes, [g, a, cod, dom](const Subset& zs) {
                     Subset in = zs & dom, r(g.nodes);
                     for (size_t v : cod.elements()) {
                         bool ok = false;
                         switch (g.kind[v]) {
                             case NodeKind::Min:
                             case NodeKind::Max: {
                                 bool is_min = g.kind[v] == NodeKind::Min;
                                 Rational best = a[g.succ[v][0]];
                                 for (size_t t : g.succ[v]) best = is_min ? std::min(best, a[t]) : std::max(best, a[t]);
                                 ok = !is_min;
                                 for (size_t t : g.succ[v])
                                     if (a[t] == best) ok = is_min ? (ok || in.contains(t)) : (ok && in.contains(t));
                                 break;
                             }
                             case NodeKind::Av: {
                                 const auto& w = g.dist[v].w;
                                 ok = std::all_of(w.begin(), w.end(), [&](auto& e) { return in.contains(e.first); });
                                 break;
                             }
                             case NodeKind::Sink: break;
                         }
                         if (ok) r.insert(v);
                     }
                     return r;
                 }};
}

class SsgFunction : public FixpointFunction {
public:
    explicit SsgFunction(Ssg g) : g_(std::move(g)), expr_(value_fn(g_)) {}
    UniversePtr universe() const override { return g_.nodes; }
    Chain chain() const override { return Chain::unit(); }
    Valuation eval(const Valuation& a) const override { return eval_game(g_, a); }
    SetFn approx(const Valuation& a, Side side) const override {
        return side == Side::Dual ? value_approx_dual(g_, a) : mvfix::approx(expr_, a, side);
    }
    Rational iota(const Valuation& a, Side side) const override { return mvfix::iota(expr_, a, side); }
    const FnPtr& expr() const { return expr_; }

private:
    Ssg g_;
    FnPtr expr_;
};

struct SolveStats {
    int iterations = 0;  // outer rounds, one exact solve each
    int jumps = 0;
    int lp_calls = 0;
    std::ostream* lp_trace = nullptr;
};

namespace detail {

inline LpResult run_lp(const LinearProgram& lp, SolveStats* st, const char* what) {
    if (st) {
        ++st->lp_calls;
        if (st->lp_trace) *st->lp_trace << "# " << what << " (call " << st->lp_calls << ")\n" << dump_lp(lp) << "\n";
    }
    LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) throw std::logic_error(std::string(what) + ": LP is " + lp_status_name(r.status));
    return r;
}

inline void add_linear(LinearProgram& lp, size_t v, const std::vector<std::pair<size_t, Rational>>& rhs, Rel rel) {
    std::map<size_t, Rational> row{{v, Rational(1)}};
    for (auto& [t, p] : rhs) row[t] -= p;
    lp.add_row({row.begin(), row.end()}, rel, 0);
}

}  // namespace detail

// μV_τ: min Σ a with a(v) = a(τ v) on MIN, a(v) ≥ successors on MAX.
inline Valuation lfp_fixed_min(const Ssg& g, const Strategy& tau, SolveStats* st = nullptr) {
    check_strategy(g, tau);
    LinearProgram lp;
    lp.sense = Sense::Min;
    for (size_t v = 0; v < g.size(); ++v) lp.add_var(g.nodes->id(v), 1);
    for (size_t v = 0; v < g.size(); ++v) {
        switch (g.kind[v]) {
            case NodeKind::Min: detail::add_linear(lp, v, {{tau.choice[v], Rational(1)}}, Rel::Eq); break;
            case NodeKind::Max:
                for (size_t t : g.succ[v]) detail::add_linear(lp, v, {{t, Rational(1)}}, Rel::Ge);
                break;
            case NodeKind::Av: detail::add_linear(lp, v, g.dist[v].w, Rel::Eq); break;
            case NodeKind::Sink: lp.add_row({{v, Rational(1)}}, Rel::Eq, g.w[v]); break;
        }
    }
    auto r = detail::run_lp(lp, st, "lfp_fixed_min");
    return Valuation(g.nodes, Chain::unit(), std::move(r.x));
}

// C_σ = ν c_σ: nodes from which Min forces an infinite play once σ is fixed.
inline Subset forced_cycle_nodes(const Ssg& g, const Strategy& sigma) {
    check_strategy(g, sigma);
    SetFn c{g.nodes, g.nodes, [&](const Subset& vs) {
                Subset r(g.nodes);
                for (size_t v = 0; v < g.size(); ++v) {
                    bool in = false;
                    switch (g.kind[v]) {
                        case NodeKind::Min:
                            in = std::any_of(g.succ[v].begin(), g.succ[v].end(), [&](size_t t) { return vs.contains(t); });
                            break;
                        case NodeKind::Max: in = vs.contains(sigma.choice[v]); break;
                        case NodeKind::Av: {
                            const auto& w = g.dist[v].w;
                            in = std::all_of(w.begin(), w.end(), [&](auto& e) { return vs.contains(e.first); });
                            break;
                        }
                        case NodeKind::Sink: break;
                    }
                    if (in) r.insert(v);
                }
                return r;
            }};
    return gfp_setfn(c, Subset::full(g.nodes));
}

// μV_σ: pin C_σ to 0, then max Σ a with a(v) ≤ successors on MIN and a(v) = a(σ v) on MAX.
inline Valuation lfp_fixed_max(const Ssg& g, const Strategy& sigma, SolveStats* st = nullptr) {
    Subset cyc = forced_cycle_nodes(g, sigma);
    LinearProgram lp;
    lp.sense = Sense::Max;
    for (size_t v = 0; v < g.size(); ++v) lp.add_var(g.nodes->id(v), 1, Rational(1));
    for (size_t v = 0; v < g.size(); ++v) {
        if (g.kind[v] == NodeKind::Sink) {
            lp.add_row({{v, Rational(1)}}, Rel::Eq, g.w[v]);
            continue;
        }
        if (cyc.contains(v)) {
            lp.add_row({{v, Rational(1)}}, Rel::Eq, 0);
            continue;
        }
        switch (g.kind[v]) {
            case NodeKind::Min:
                for (size_t t : g.succ[v]) detail::add_linear(lp, v, {{t, Rational(1)}}, Rel::Le);
                break;
            case NodeKind::Max: detail::add_linear(lp, v, {{sigma.choice[v], Rational(1)}}, Rel::Eq); break;
            case NodeKind::Av: detail::add_linear(lp, v, g.dist[v].w, Rel::Eq); break;
            case NodeKind::Sink: break;
        }
    }
    auto r = detail::run_lp(lp, st, "lfp_fixed_max");
    Valuation a(g.nodes, Chain::unit(), std::move(r.x));
    if (!(eval_game(g, a, &sigma) == a)) throw std::logic_error("lfp_fixed_max: LP optimum is not a fixpoint of V_σ");
    return a;
}

// Switch only where the owner strictly improves; ties go to the lowest node index.
inline Strategy switch_strategy(const Ssg& g, const Strategy& s, const Valuation& a) {
    Strategy out = s;
    const bool is_min = s.owner == NodeKind::Min;
    for (size_t v = 0; v < g.size(); ++v) {
        if (g.kind[v] != s.owner) continue;
        size_t best = g.succ[v][0];
        for (size_t t : g.succ[v])
            if (is_min ? a[t] < a[best] : a[t] > a[best]) best = t;
        if (is_min ? a[best] < a[s.choice[v]] : a[best] > a[s.choice[v]]) out.choice[v] = best;
    }
    return out;
}
inline Strategy switch_min(const Ssg& g, const Strategy& tau, const Valuation& a) { return switch_strategy(g, tau, a); }
inline Strategy switch_max(const Ssg& g, const Strategy& sigma, const Valuation& a) { return switch_strategy(g, sigma, a); }

struct GameSolution {
    Valuation values;
    Strategy strategy;
    SolveStats stats;
};

namespace detail {
inline bool strictly_below(const Valuation& x, const Valuation& y) { return x.leq(y) && !(x == y); }
}  // namespace detail

// Strategy iteration from above: descend through μV_τ, jumping off non-least fixpoints.
inline GameSolution strategy_iteration_above(const Ssg& g, std::optional<Strategy> tau0 = std::nullopt,
                                             std::ostream* lp_trace = nullptr) {
    GameSolution sol{{}, tau0 ? *tau0 : initial_strategy(g, NodeKind::Min), {}};
    sol.stats.lp_trace = lp_trace;
    Strategy& tau = sol.strategy;
    SsgFunction f(g);
    Valuation a = lfp_fixed_min(g, tau, &sol.stats);
    ++sol.stats.iterations;
    for (;;) {
        Strategy next = switch_min(g, tau, a);
        if (!(next == tau)) {
            tau = std::move(next);
            Valuation b = lfp_fixed_min(g, tau, &sol.stats);
            ++sol.stats.iterations;
            if (!detail::strictly_below(b, a)) throw std::logic_error("strategy iteration from above did not decrease");
            a = std::move(b);
            continue;
        }
        if (gfp_setfn(value_approx_dual(g, a), support_ceil(a)).empty()) {
            sol.values = std::move(a);
            return sol;
        }
        Jump j = improve_pre_fixpoint(f, a);
        ++sol.stats.jumps;
        next = switch_min(g, tau, j.value);
        if (next == tau) throw std::logic_error("no switch after a jump");
        tau = std::move(next);
        Valuation next_a = lfp_fixed_min(g, tau, &sol.stats);
        ++sol.stats.iterations;
        if (!next_a.leq(j.value))
            throw std::logic_error("strategy iteration from above did not decrease after a jump");
        a = std::move(next_a);
    }
}

// Strategy iteration from below: ascend through μV_σ until Max has no strict improvement.
inline GameSolution strategy_iteration_below(const Ssg& g, std::optional<Strategy> sigma0 = std::nullopt,
                                             std::ostream* lp_trace = nullptr) {
    GameSolution sol{{}, sigma0 ? *sigma0 : initial_strategy(g, NodeKind::Max), {}};
    sol.stats.lp_trace = lp_trace;
    Strategy& sigma = sol.strategy;
    Valuation a = lfp_fixed_max(g, sigma, &sol.stats);
    ++sol.stats.iterations;
    for (;;) {
        Strategy next = switch_max(g, sigma, a);
        if (next == sigma) {
            sol.values = std::move(a);
            return sol;
        }
        sigma = std::move(next);
        Valuation b = lfp_fixed_max(g, sigma, &sol.stats);
        ++sol.stats.iterations;
        if (!detail::strictly_below(a, b)) throw std::logic_error("strategy iteration from below did not increase");
        a = std::move(b);
    }
}

struct KleeneResult {
    std::vector<double> values;
    long steps = 0;
};

// Ascending value iteration in doubles from 0.
inline KleeneResult kleene_value_iteration(const Ssg& g, double tol, long max_steps = 10000000) {
    if (!(tol > 0)) throw PreconditionError("tolerance must be positive");
    const size_t n = g.size();
    std::vector<std::vector<std::pair<size_t, double>>> dist(n);
    for (size_t v = 0; v < n; ++v)
        for (auto& [t, p] : g.dist[v].w) dist[v].emplace_back(t, p.get_d());
    KleeneResult r{std::vector<double>(n, 0.0), 0};
    std::vector<double> next(n);
    while (r.steps < max_steps) {
        double change = 0;
        for (size_t v = 0; v < n; ++v) {
            double x = 0;
            switch (g.kind[v]) {
                case NodeKind::Min:
                case NodeKind::Max:
                    x = r.values[g.succ[v][0]];
                    for (size_t t : g.succ[v]) x = g.kind[v] == NodeKind::Min ? std::min(x, r.values[t]) : std::max(x, r.values[t]);
                    break;
                case NodeKind::Av:
                    for (auto& [t, p] : dist[v]) x += p * r.values[t];
                    break;
                case NodeKind::Sink: x = g.w[v].get_d(); break;
            }
            next[v] = x;
            change = std::max(change, std::abs(x - r.values[v]));
        }
        r.values.swap(next);
        ++r.steps;
        if (change < tol) break;
    }
    return r;
}

// Value of the Markov chain induced by fixing both players; plays that never reach a sink pay 0.
inline Valuation induced_value(const Ssg& g, const Strategy& sigma, const Strategy& tau) {
    const size_t n = g.size();
    std::vector<std::vector<std::pair<size_t, Rational>>> step(n);
    std::vector<std::vector<size_t>> succ(n);
    std::vector<char> sink(n, 0);
    for (size_t v = 0; v < n; ++v) {
        switch (g.kind[v]) {
            case NodeKind::Min: step[v] = {{tau.choice[v], Rational(1)}}; break;
            case NodeKind::Max: step[v] = {{sigma.choice[v], Rational(1)}}; break;
            case NodeKind::Av: step[v] = g.dist[v].w; break;
            case NodeKind::Sink: sink[v] = 1; break;
        }
        for (auto& [t, p] : step[v]) succ[v].push_back(t);
    }
    auto reach = can_reach(succ, sink);
    std::vector<size_t> pos(n, 0), unknown;
    for (size_t v = 0; v < n; ++v)
        if (reach[v] && !sink[v]) {
            pos[v] = unknown.size();
            unknown.push_back(v);
        }
    std::vector<std::vector<Rational>> a(unknown.size(), std::vector<Rational>(unknown.size()));
    std::vector<Rational> b(unknown.size());
    for (size_t r = 0; r < unknown.size(); ++r) {
        size_t v = unknown[r];
        a[r][r] += 1;
        for (auto& [t, p] : step[v]) {
            if (sink[t]) b[r] += p * g.w[t];
            else if (reach[t]) a[r][pos[t]] -= p;
        }
    }
    auto x = solve_linear(std::move(a), std::move(b));
    std::vector<Rational> val(n);
    for (size_t v = 0; v < n; ++v)
        if (sink[v]) val[v] = g.w[v];
    for (size_t r = 0; r < unknown.size(); ++r) val[unknown[r]] = x[r];
    return Valuation(g.nodes, Chain::unit(), std::move(val));
}

namespace detail {
// Calls f on every positional strategy of `owner`.
template <class F>
void for_each_strategy(const Ssg& g, NodeKind owner, F&& f) {
    Strategy s = initial_strategy(g, owner);
    std::vector<size_t> owned, idx;
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == owner) owned.push_back(v);
    idx.assign(owned.size(), 0);
    for (;;) {
        for (size_t i = 0; i < owned.size(); ++i) s.choice[owned[i]] = g.succ[owned[i]][idx[i]];
        f(s);
        size_t i = 0;
        while (i < owned.size() && ++idx[i] == g.succ[owned[i]].size()) idx[i++] = 0;
        if (i == owned.size()) return;
    }
}
inline double strategy_count(const Ssg& g, NodeKind owner) {
    double c = 1;
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == owner) c *= static_cast<double>(g.succ[v].size());
    return c;
}
}  // namespace detail

// max over σ of min over τ, pointwise; positional strategies suffice.
inline Valuation brute_force_value(const Ssg& g, double cap = 1e6) {
    if (detail::strategy_count(g, NodeKind::Min) * detail::strategy_count(g, NodeKind::Max) > cap)
        throw PreconditionError("brute_force_value: too many strategy pairs");
    std::optional<Valuation> best;
    detail::for_each_strategy(g, NodeKind::Max, [&](const Strategy& sigma) {
        std::optional<Valuation> worst;
        detail::for_each_strategy(g, NodeKind::Min, [&](const Strategy& tau) {
            Valuation v = induced_value(g, sigma, tau);
            if (!worst) {
                worst = v;
                return;
            }
            for (size_t i = 0; i < v.size(); ++i)
                if (v[i] < (*worst)[i]) worst->set(i, v[i]);
        });
        if (!best) {
            best = *worst;
            return;
        }
        for (size_t i = 0; i < worst->size(); ++i)
            if ((*worst)[i] > (*best)[i]) best->set(i, (*worst)[i]);
    });
    return *best;
}

}  // namespace mvfix
