#include "mvfix/selftest.hpp"

#include <chrono>
#include <functional>

#include "mvfix/corpus.hpp"

namespace mvfix {

namespace {

using corpus::q;

std::string set_str(const Subset& s) {
    std::string out = "{";
    for (auto& n : s.names()) out += (out.size() > 1 ? " " : "") + ("(" + n + ")");
    return out + "}";
}
std::string set_str(const UniversePtr& u, const std::vector<std::string>& ids) { return set_str(Subset::of(u, ids)); }

std::string cert_str(const Certificate& c) { return std::string(verdict_name(c.verdict)) + " " + set_str(c.witness); }

Valuation vals(const UniversePtr& u, std::vector<const char*> xs) {
    std::vector<Rational> v;
    for (auto* x : xs) v.push_back(q(x));
    return Valuation(u, Chain::unit(), std::move(v));
}

struct Case {
    const char* name;
    std::function<std::pair<std::string, std::string>()> run;  // expected, got
};

std::vector<Case> cases() {
    std::vector<Case> cs;

    cs.push_back({"fig1 termination probability", [] {
                      auto mc = corpus::fig1_chain();
                      return std::pair{vals(mc.states, {"1/2", "1", "0", "0"}).str(), term_prob_exact(mc).str()};
                  }});
    cs.push_back({"fig1 red fixpoint refuted", [] {
                      auto mc = corpus::fig1_chain();
                      ExprFunction t(term_fn(mc));
                      return std::pair{"refuted " + set_str(mc.states, {"y", "z"}),
                                       cert_str(is_least_fixpoint(t, corpus::fig1_red(mc)))};
                  }});
    cs.push_back({"running-1 support, alpha, gamma", [] {
                      auto a = corpus::running_a();
                      auto u = a.universe();
                      auto y13 = Subset::of(u, {"y1", "y3"});
                      std::string exp = set_str(u, {"y1", "y2", "y3"}) + " 1/10 " + vals(u, {"0.3", "0.4", "1", "1"}).str() +
                                        " " + set_str(y13);
                      std::string got = set_str(support_floor(a)) + " " + format_rational(delta_floor(a)) + " " +
                                        alpha(a, q("0.1"), y13).str() + " " +
                                        set_str(gamma(a, q("0.1"), vals(u, {"0.3", "0.45", "1", "1"})));
                      return std::pair{exp, got};
                  }});
    cs.push_back({"running-2 approximation regimes", [] {
                      auto a = corpus::running_a();
                      auto u = a.universe();
                      auto f = fn::translate(u, Chain::unit(), q("0.3"), false);
                      auto ys = Subset::of(u, {"y1", "y2", "y3"});
                      std::string exp = set_str(u, {"y2", "y3"}) + " " + set_str(u, {"y2"}) + " " + set_str(u, {});
                      std::string got;
                      for (auto* d : {"0.05", "0.3", "0.7"}) got += (got.empty() ? "" : " ") + set_str(approx_at(f, a, q(d), ys));
                      return std::pair{exp, got};
                  }});
    cs.push_back({"running-3 largest increase", [] {
                      // g = id ⊕ 0.1; the increase on {y1,y2} is bounded by y2's slack after g.
                      auto a = corpus::running_a();
                      auto u = a.universe();
                      auto g = fn::translate(u, Chain::unit(), q("0.1"), true);
                      auto ys = Subset::of(u, {"y1", "y2"});
                      auto kept = [&](const char* d) { return ys.subset_of(approx_at(g, a, q(d), ys)); };
                      std::string got = format_rational(delta_floor_on(a, ys)) + " " + (kept("0.5") ? "holds" : "fails") +
                                        "@1/2 " + (kept("0.51") ? "holds" : "fails") + "@51/100";
                      return std::pair{std::string("3/5 holds@1/2 fails@51/100"), got};
                  }});
    cs.push_back({"markov-no-greatest jump", [] {
                      auto mc = corpus::no_greatest_chain();
                      ExprFunction t(term_fn(mc));
                      auto a = corpus::no_greatest_t(mc);
                      auto nu = gfp_setfn(t.approx(a, Side::Dual), support_ceil(a));
                      auto j = improve_pre_fixpoint(t, a);
                      auto far = a.ominus_on(Subset::full(mc.states), q("0.5"));
                      std::string exp = set_str(Subset::full(mc.states)) + " " + vals(mc.states, {"0", "0.4", "0.8"}).str() +
                                        " not-pre";
                      std::string got = set_str(nu) + " " + j.value.str() + (t.eval(far).leq(far) ? " pre" : " not-pre");
                      return std::pair{exp, got};
                  }});
    cs.push_back({"mts least fixpoint (published value)", [] {
                      auto m = corpus::mts_example();
                      auto exp = Valuation(m.pairs, Chain::unit(),
                                           {0, q("1/2"), q("3/10"), q("1/2"), 0, q("1/2"), q("3/10"), q("1/2"), 0});
                      return std::pair{exp.str(), mts_distance(m).value.str()};
                  }});
    cs.push_back({"mts witness at d = 1/2", [] {
                      auto m = corpus::mts_example();
                      MtsFunction j(m);
                      auto half = corpus::constant_off_diagonal(m.pairs, 3, q("1/2"));
                      std::string got = j.eval(half) == half ? "fixpoint " : "not-fixpoint ";
                      got += set_str(gfp_setfn(j.approx(half, Side::Dual), support_ceil(half)));
                      return std::pair{"fixpoint " + set_str(m.pairs, {"x,z", "z,x"}), got};
                  }});
    cs.push_back({"bisim-1 certified", [] {
                      auto ts = corpus::bisim_ts();
                      auto c = witness_nonbisim(ts, corpus::bisim_candidate(ts, {"x,u", "y,u"}), "x", "u");
                      return std::pair{std::string("certified {}"), cert_str(c)};
                  }});
    cs.push_back({"bisim-2 inconclusive", [] {
                      auto ts = corpus::bisim_ts();
                      auto c = witness_nonbisim(ts, corpus::bisim_candidate(ts, {"x,u"}), "x", "u");
                      return std::pair{"inconclusive " + set_str(ts.pairs, {"x,u"}), cert_str(c)};
                  }});
    cs.push_back({"ssg strategy iteration from above", [] {
                      auto g = corpus::ssg_example(q("1/4"));
                      auto r = strategy_iteration_above(g, corpus::ssg_strategy(g, NodeKind::Min, "min", "one"));
                      auto exp = vals(g.nodes, {"1", "1/4", "1/4", "1/4", "1/4"}).str() + " jumped";
                      return std::pair{exp, r.values.str() + (r.stats.jumps >= 1 ? " jumped" : " no-jump")};
                  }});
    cs.push_back({"ssg strategy iteration from below", [] {
                      auto g = corpus::ssg_example(q("1/4"));
                      auto r = strategy_iteration_below(g, corpus::ssg_strategy(g, NodeKind::Max, "max", "av"));
                      return std::pair{vals(g.nodes, {"1", "1/4", "1/4", "1/4", "1/4"}).str(), r.values.str()};
                  }});
    cs.push_back({"ssg forced cycle", [] {
                      auto g = corpus::ssg_example(q("1/4"));
                      auto c = forced_cycle_nodes(g, corpus::ssg_strategy(g, NodeKind::Max, "max", "av"));
                      return std::pair{set_str(g.nodes, {"min", "av", "max"}), set_str(c)};
                  }});
    return cs;
}

}  // namespace

std::vector<SelftestRow> run_selftest() {
    std::vector<SelftestRow> rows;
    for (auto& c : cases()) {
        SelftestRow r;
        r.name = c.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto [exp, got] = c.run();
            r.expected = exp;
            r.got = got;
            r.pass = exp == got;
        } catch (const std::exception& e) {
            r.got = std::string("error: ") + e.what();
        }
        r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace mvfix
