#pragma once
// Small worked examples shared by the self-test, the acceptance binary and the unit tests.
#include "mvfix/games.hpp"
#include "mvfix/models/bisim.hpp"
#include "mvfix/models/markov.hpp"
#include "mvfix/models/mts.hpp"
#include "mvfix/models/pa.hpp"

namespace mvfix::corpus {

inline Rational q(const char* s) { return parse_rational(s); }

// x loops, exits to u (terminal) or falls into the y/z cycle, each with 1/3.
inline MarkovChain fig1_chain() {
    return make_markov_chain({"x", "u", "y", "z"}, {"u"},
                             {{"x", {{"x", q("1/3")}, {"u", q("1/3")}, {"y", q("1/3")}}},
                              {"y", {{"z", q("1")}}},
                              {"z", {{"y", q("1")}}}});
}
inline Valuation fig1_red(const MarkovChain& mc) { return Valuation::constant(mc.states, Chain::unit(), 1); }

inline UniversePtr running_universe() { return Universe::make({"y1", "y2", "y3", "y4"}); }
inline Valuation running_a() {
    return Valuation(running_universe(), Chain::unit(), {q("0.2"), q("0.4"), q("0.9"), q("1")});
}

// x1 and x3 loop; x2 splits evenly between them. Nothing terminates.
inline MarkovChain no_greatest_chain() {
    return make_markov_chain({"x1", "x2", "x3"}, {},
                             {{"x1", {{"x1", q("1")}}},
                              {"x2", {{"x1", q("1/2")}, {"x3", q("1/2")}}},
                              {"x3", {{"x3", q("1")}}}});
}
inline Valuation no_greatest_t(const MarkovChain& mc) {
    return Valuation(mc.states, Chain::unit(), {q("0.1"), q("0.5"), q("0.9")});
}

inline MetricTS mts_example() {
    return make_mts({"x", "y", "z"}, {{"x", q("0.1")}, {"y", q("0.6")}, {"z", q("0.3")}},
                    {{"x", {"x", "z"}}, {"y", {"x", "y", "z"}}, {"z", {"x"}}});
}
// 1/2 off the diagonal, 0 on it.
inline Valuation constant_off_diagonal(const UniversePtr& pairs, size_t n, const Rational& v) {
    std::vector<Rational> d(n * n, v);
    for (size_t i = 0; i < n; ++i) d[i * n + i] = 0;
    return Valuation(pairs, Chain::unit(), std::move(d));
}

inline TransitionSystem bisim_ts() { return make_ts({"x", "y", "u"}, {{"x", {"x", "y"}}, {"u", {"u"}}}); }
inline Valuation bisim_candidate(const TransitionSystem& ts, const std::vector<std::string>& zero_pairs) {
    Valuation a = Valuation::constant(ts.pairs, Chain::boolean(), 1);
    for (auto& p : zero_pairs) a.set(ts.pairs->at(p), 0);
    return a;
}

// Node order: 1-sink, ε-sink, min, av, max.
inline Ssg ssg_example(const Rational& eps) {
    return make_ssg({{"one", NodeKind::Sink, {}, {}, 1},
                     {"eps", NodeKind::Sink, {}, {}, eps},
                     {"min", NodeKind::Min, {"one", "av"}, {}, 0},
                     {"av", NodeKind::Av, {}, {{"min", q("1/2")}, {"max", q("1/2")}}, 0},
                     {"max", NodeKind::Max, {"eps", "av"}, {}, 0}});
}
inline Strategy ssg_strategy(const Ssg& g, NodeKind owner, const std::string& node, const std::string& target) {
    Strategy s = initial_strategy(g, owner);
    s.choice[g.nodes->at(node)] = g.nodes->at(target);
    return s;
}

// Two equally labelled states that each loop with probability 1: distance 0, but 1 is also a fixpoint.
inline ProbAutomaton pa_loops() {
    return make_pa({"s", "t"}, {{"s", "a"}, {"t", "a"}}, {{"s", {{{"s", q("1")}}}}, {"t", {{{"t", q("1")}}}}});
}

}  // namespace mvfix::corpus
