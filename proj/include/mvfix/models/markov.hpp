#pragma once
// Markov chains with terminal states: termination probability as a least fixpoint.
#include <map>
#include <string>
#include <vector>

#include "mvfix/linsolve.hpp"
#include "mvfix/proof.hpp"

namespace mvfix {

struct MarkovChain {
    UniversePtr states;
    std::vector<char> terminal;
    std::vector<Distribution> eta;  // empty for terminal states
};

inline MarkovChain make_markov_chain(std::vector<std::string> states, const std::vector<std::string>& terminal,
                                     const std::map<std::string, std::map<std::string, Rational>>& dist) {
    MarkovChain mc;
    mc.states = Universe::make(std::move(states));
    const size_t n = mc.states->size();
    mc.terminal.assign(n, 0);
    mc.eta.resize(n);
    for (auto& t : terminal) mc.terminal[mc.states->at(t)] = 1;
    for (auto& [s, row] : dist) {
        size_t i = mc.states->at(s);
        if (mc.terminal[i]) throw PreconditionError("terminal state '" + s + "' must not have a distribution");
        std::vector<std::pair<size_t, Rational>> w;
        for (auto& [t, p] : row) w.emplace_back(mc.states->at(t), p);
        mc.eta[i] = make_distribution(std::move(w));
    }
    for (size_t i = 0; i < n; ++i)
        if (!mc.terminal[i] && mc.eta[i].w.empty())
            throw PreconditionError("non-terminal state '" + mc.states->id(i) + "' has no distribution");
    return mc;
}

// T = (η* ∘ av_D) ⊎ c_1 over the states.
inline FnPtr term_fn(const MarkovChain& mc) {
    const auto& S = mc.states;
    const Chain ch = Chain::unit();
    std::vector<size_t> nonterm, term;
    for (size_t i = 0; i < S->size(); ++i) (mc.terminal[i] ? term : nonterm).push_back(i);
    std::vector<size_t> identity(S->size());
    for (size_t i = 0; i < identity.size(); ++i) identity[i] = i;

    std::vector<UnionPart> parts;
    if (!nonterm.empty()) {
        std::vector<Distribution> D;
        std::vector<size_t> pick;
        for (size_t s : nonterm) {
            auto it = std::find(D.begin(), D.end(), mc.eta[s]);
            pick.push_back(static_cast<size_t>(it - D.begin()));
            if (it == D.end()) D.push_back(mc.eta[s]);
        }
        std::vector<std::string> dids, nids;
        for (size_t k = 0; k < D.size(); ++k) dids.push_back("d" + std::to_string(k));
        for (size_t s : nonterm) nids.push_back(S->id(s));
        auto Du = Universe::make(dids);
        auto Nu = Universe::make(nids);
        auto av = fn::average(S, Du, ch, D);
        auto re = fn::reindex(Du, Nu, ch, pick);
        parts.push_back({fn::compose(re, av), identity, nonterm});
    }
    if (!term.empty()) {
        std::vector<std::string> tids;
        for (size_t s : term) tids.push_back(S->id(s));
        auto Tu = Universe::make(tids);
        parts.push_back({fn::constant(S, Valuation::constant(Tu, ch, 1)), identity, term});
    }
    return fn::disjoint_union(S, S, std::move(parts));
}

namespace detail {

inline std::vector<std::vector<size_t>> mc_successors(const MarkovChain& mc) {
    std::vector<std::vector<size_t>> succ(mc.states->size());
    for (size_t s = 0; s < succ.size(); ++s)
        for (auto& [t, p] : mc.eta[s].w) succ[s].push_back(t);
    return succ;
}

// Fixpoint of T determined by a value per closed class among states that cannot reach T.
template <class ClassValue>
Valuation mc_solve(const MarkovChain& mc, ClassValue&& class_value) {
    const size_t n = mc.states->size();
    auto succ = mc_successors(mc);
    auto reach = can_reach(succ, mc.terminal);
    size_t ncomp = 0;
    auto comp = scc(succ, ncomp);
    std::vector<char> closed(ncomp, 1);
    for (size_t s = 0; s < n; ++s) {
        if (reach[s]) closed[comp[s]] = 0;
        for (size_t t : succ[s])
            if (comp[t] != comp[s]) closed[comp[s]] = 0;
    }
    std::vector<Rational> val(n);
    std::vector<char> known(n, 0);
    std::vector<std::vector<size_t>> members(ncomp);
    for (size_t s = 0; s < n; ++s)
        if (!reach[s] && closed[comp[s]]) members[comp[s]].push_back(s);
    for (size_t c = 0; c < ncomp; ++c) {
        if (members[c].empty()) continue;
        Rational v = class_value(members[c]);
        for (size_t s : members[c]) {
            val[s] = v;
            known[s] = 1;
        }
    }
    for (size_t s = 0; s < n; ++s)
        if (mc.terminal[s]) {
            val[s] = 1;
            known[s] = 1;
        }
    std::vector<size_t> unknown, pos(n, 0);
    for (size_t s = 0; s < n; ++s)
        if (!known[s]) {
            pos[s] = unknown.size();
            unknown.push_back(s);
        }
    std::vector<std::vector<Rational>> a(unknown.size(), std::vector<Rational>(unknown.size()));
    std::vector<Rational> b(unknown.size());
    for (size_t r = 0; r < unknown.size(); ++r) {
        size_t s = unknown[r];
        a[r][r] += 1;
        for (auto& [t, p] : mc.eta[s].w) {
            if (known[t]) b[r] += p * val[t];
            else a[r][pos[t]] -= p;
        }
    }
    auto x = solve_linear(std::move(a), std::move(b));
    for (size_t r = 0; r < unknown.size(); ++r) val[unknown[r]] = x[r];
    return Valuation(mc.states, Chain::unit(), std::move(val));
}

}  // namespace detail

// μT: states that cannot reach T are pinned to 0, the rest is a non-singular linear system.
inline Valuation term_prob_exact(const MarkovChain& mc) {
    return detail::mc_solve(mc, [](const std::vector<size_t>&) { return Rational(0); });
}

// Greatest fixpoint of T below a pre-fixpoint b (the limit of T^n(b)).
inline Valuation mc_fixpoint_below(const MarkovChain& mc, const Valuation& b) {
    return detail::mc_solve(mc, [&](const std::vector<size_t>& cls) {
        Rational m = b[cls[0]];
        for (size_t s : cls) m = std::min(m, b[s]);
        return m;
    });
}

// T_#^t(S') = {s ∈ [S]_{T(t)} | s ∉ T, supp(η(s)) ⊆ S'}
inline SetFn term_approx_dual(const MarkovChain& mc, const Valuation& t) {
    Valuation Tt = eval(*term_fn(mc), t);
    Subset cod = support_ceil(Tt), dom = support_ceil(t);
    return SetFn{mc.states, mc.states, [mc, cod, dom](const Subset& ys) {
                     Subset in = ys & dom, r(mc.states);
                     for (size_t s : cod.elements()) {
                         if (mc.terminal[s]) continue;
                         const auto& w = mc.eta[s].w;
                         if (std::all_of(w.begin(), w.end(), [&](auto& e) { return in.contains(e.first); })) r.insert(s);
                     }
                     return r;
                 }};
}

// μT from above: start at the top valuation, jump off each non-least fixpoint.
inline ExtremalResult term_prob_via_jumps(const MarkovChain& mc) {
    ExprFunction f(term_fn(mc));
    auto top = Valuation::constant(mc.states, Chain::unit(), 1);
    return extremal_fixpoint_via_jumps(
        f, top, [&](const Valuation& b) { return mc_fixpoint_below(mc, b); }, Extremum::Least);
}

}  // namespace mvfix
