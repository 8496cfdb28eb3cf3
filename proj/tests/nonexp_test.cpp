#include <gtest/gtest.h>

#include "support.hpp"

using namespace mvfix;
using corpus::q;

namespace {

Valuation vals(const UniversePtr& un, std::vector<const char*> xs) {
    std::vector<Rational> v;
    for (auto* x : xs) v.push_back(q(x));
    return Valuation(un, Chain::unit(), v);
}

auto evaluator(const FnPtr& f) {
    return [f](const Valuation& v) { return eval(f, v); };
}

}  // namespace

TEST(Eval, TranslateDown) {
    auto a = corpus::running_a();
    auto f = fn::translate(a.universe(), Chain::unit(), q("0.3"), false);
    EXPECT_EQ(eval(f, a), vals(a.universe(), {"0", "0.1", "0.6", "0.7"}));
}

TEST(Eval, ConstantIgnoresInput) {
    auto a = corpus::running_a();
    auto cod = Universe::make({"z"});
    auto k = Valuation(cod, Chain::unit(), {q("2/7")});
    EXPECT_EQ(eval(fn::constant(a.universe(), k), a), k);
}

TEST(Eval, AverageOfOnes) {
    auto mc = corpus::fig1_chain();
    auto one = Valuation::constant(mc.states, Chain::unit(), 1);
    auto f = fn::average(mc.states, Universe::make({"x"}), Chain::unit(), {mc.eta[0]});
    EXPECT_EQ(eval(f, one)[0], 1);
}

TEST(Eval, EmptyRelationsUseLatticeConventions) {
    auto dom = Universe::make({"a"}), cod = Universe::make({"z"});
    Valuation a(dom, Chain::unit(), {q("1/2")});
    EXPECT_EQ(eval(fn::min_rel(dom, cod, Chain::unit(), {{}}), a)[0], 1);
    EXPECT_EQ(eval(fn::max_rel(dom, cod, Chain::unit(), {{}}), a)[0], 0);
}

TEST(Eval, ComposeAndUnion) {
    auto y = Universe::make({"a", "b"}), z = Universe::make({"m"});
    Valuation v(y, Chain::unit(), {q("1/4"), q("3/4")});
    auto mn = fn::min_rel(y, z, Chain::unit(), {{0, 1}});
    auto up = fn::translate(z, Chain::unit(), q("1/2"), true);
    EXPECT_EQ(eval(fn::compose(up, mn), v)[0], q("3/4"));

    auto d1 = Universe::make({"p"}), d2 = Universe::make({"r"});
    auto id1 = fn::reindex(d1, d1, Chain::unit(), {0});
    auto c2 = fn::constant(d2, Valuation(d2, Chain::unit(), {q("1/3")}));
    auto un = fn::disjoint_union(y, y, {UnionPart{id1, {1}, {0}}, UnionPart{c2, {0}, {1}}});
    EXPECT_EQ(eval(un, v), Valuation(y, Chain::unit(), {q("3/4"), q("1/3")}));
}

TEST(Construction, RejectsMalformedExpressions) {
    auto y = Universe::make({"a", "b"}), z = Universe::make({"m"});
    EXPECT_THROW(fn::reindex(y, z, Chain::unit(), {2}), PreconditionError);
    EXPECT_THROW(fn::min_rel(y, z, Chain::unit(), {}), PreconditionError);
    EXPECT_THROW(fn::average(y, z, Chain::unit(), {make_distribution({{0, q("1/2")}})}), PreconditionError);
    EXPECT_THROW(fn::average(y, z, Chain::bounded(3), {make_distribution({{0, 1}})}), PreconditionError);
    EXPECT_THROW(fn::compose(fn::reindex(y, y, Chain::unit(), {0, 1}), fn::reindex(y, z, Chain::unit(), {0})),
                 PreconditionError);
    auto part = fn::reindex(z, z, Chain::unit(), {0});
    EXPECT_THROW(fn::disjoint_union(y, y, {UnionPart{part, {0}, {0}}, UnionPart{part, {1}, {0}}}), PreconditionError);
    EXPECT_THROW(eval(part, Valuation::constant(y, Chain::unit(), 0)), PreconditionError);
}

TEST(Galois, AlphaExamples) {
    auto a = corpus::running_a();
    auto u = a.universe();
    EXPECT_EQ(alpha(a, q("0.1"), Subset::of(u, {"y1", "y3"})), vals(u, {"0.3", "0.4", "1", "1"}));
    EXPECT_EQ(alpha(a, q("0.1"), Subset(u)), a);
    auto mc = corpus::no_greatest_chain();
    auto t = corpus::no_greatest_t(mc);
    EXPECT_EQ(alpha_dual(t, q("0.1"), Subset::full(mc.states)), vals(mc.states, {"0", "0.4", "0.8"}));
    EXPECT_THROW(alpha(a, q("0.1"), Subset::of(u, {"y4"})), PreconditionError);
    EXPECT_THROW(alpha(a, 0, Subset(u)), PreconditionError);
}

TEST(Galois, GammaExamples) {
    auto a = corpus::running_a();
    auto u = a.universe();
    EXPECT_EQ(gamma(a, q("0.1"), vals(u, {"0.3", "0.45", "1", "1"})), Subset::of(u, {"y1", "y3"}));
    EXPECT_TRUE(gamma(a, q("0.1"), a).empty());
    EXPECT_THROW(gamma(a, q("0.1"), vals(u, {"0.5", "0.4", "0.9", "1"})), PreconditionError);
}

TEST(Galois, RoundTripBelowDelta) {
    oracle::Rng rng(8);
    auto u = Universe::make(oracle::names("y", 5));
    for (int i = 0; i < 200; ++i) {
        auto a = random_valuation(u, Chain::unit(), rng);
        Rational d = delta_floor(a) * oracle::rand_unit(rng);
        if (d == 0) continue;
        for (auto& ys : oracle::all_subsets(support_floor(a))) {
            ASSERT_EQ(gamma(a, d, alpha(a, d, ys)), ys);
            if (delta_ceil(a) >= d) {
                auto ysd = ys & support_ceil(a);
                ASSERT_EQ(gamma_dual(a, d, alpha_dual(a, d, ysd)), ysd);
            }
        }
    }
}

TEST(ApproxAt, RunningTwoRegimes) {
    auto a = corpus::running_a();
    auto u = a.universe();
    auto f = fn::translate(u, Chain::unit(), q("0.3"), false);
    auto ys = Subset::of(u, {"y1", "y2", "y3"});
    EXPECT_EQ(approx_at(f, a, q("0.05"), ys), Subset::of(u, {"y2", "y3"}));
    EXPECT_EQ(approx_at(f, a, q("0.1"), ys), Subset::of(u, {"y2", "y3"}));
    EXPECT_EQ(approx_at(f, a, q("0.3"), ys), Subset::of(u, {"y2"}));
    EXPECT_EQ(approx_at(f, a, q("0.6"), ys), Subset::of(u, {"y2"}));
    EXPECT_TRUE(approx_at(f, a, q("0.7"), ys).empty());
    EXPECT_EQ(iota(f, a, Side::Primal), q("0.1"));
}

TEST(ApproxAt, TranslateHasNoClosedForm) {
    auto a = corpus::running_a();
    auto f = fn::translate(a.universe(), Chain::unit(), q("0.3"), false);
    EXPECT_THROW(approx_primal(f, a), UnsupportedClosedForm);
}

TEST(Approx, TableEntries) {
    auto y = Universe::make({"a", "b", "c"}), z = Universe::make({"m", "n"});
    Valuation a(y, Chain::unit(), {q("0.2"), q("0.2"), q("0.7")});
    auto all = Subset::full(y);
    // constants never propagate
    auto k = fn::constant(y, Valuation(z, Chain::unit(), {q("0.1"), q("0.5")}));
    for (auto& s : oracle::all_subsets(all)) EXPECT_TRUE(approx_primal(k, a)(s).empty());
    // reindexing is the preimage
    auto r = fn::reindex(y, z, Chain::unit(), {2, 0});
    EXPECT_EQ(approx_primal(r, a)(Subset::of(y, {"c"})), Subset::of(z, {"m"}));
    // min: all minimal points must move; max: one maximal point suffices
    auto mn = fn::min_rel(y, z, Chain::unit(), {{0, 1, 2}, {2}});
    EXPECT_TRUE(approx_primal(mn, a)(Subset::of(y, {"a"})).empty());
    EXPECT_EQ(approx_primal(mn, a)(Subset::of(y, {"a", "b"})), Subset::of(z, {"m"}));
    auto mx = fn::max_rel(y, z, Chain::unit(), {{0, 1}, {0, 2}});
    EXPECT_EQ(approx_primal(mx, a)(Subset::of(y, {"b"})), Subset::of(z, {"m"}));
    EXPECT_TRUE(approx_primal(mx, a)(Subset::of(y, {"a", "b"})).subset_of(Subset::of(z, {"m"})));
    // average needs the whole support
    auto av = fn::average(y, z, Chain::unit(),
                          {make_distribution({{0, q("1/2")}, {2, q("1/2")}}), make_distribution({{1, 1}})});
    EXPECT_TRUE(approx_primal(av, a)(Subset::of(y, {"a"})).empty());
    EXPECT_EQ(approx_primal(av, a)(Subset::of(y, {"a", "b", "c"})), Subset::full(z));
}

TEST(Approx, Fig1DualAtOne) {
    auto mc = corpus::fig1_chain();
    auto t = corpus::fig1_red(mc);
    auto g = approx_dual(term_fn(mc), t);
    auto yz = Subset::of(mc.states, {"y", "z"});
    EXPECT_EQ(g(yz), yz);
    EXPECT_EQ(gfp_setfn(g, support_ceil(t)), yz);
}

TEST(Iota, MinRelGap) {
    // per-z gaps {0.2, 0.5}, δ_a = 0.1
    auto y = Universe::make({"a", "b", "c"}), z = Universe::make({"m", "n"});
    Valuation a(y, Chain::unit(), {q("0.3"), q("0.5"), q("0.9")});
    auto mn = fn::min_rel(y, z, Chain::unit(), {{0, 1}, {1, 2}});
    EXPECT_EQ(iota(mn, a, Side::Primal), q("0.1"));
    auto k = fn::constant(y, Valuation(z, Chain::unit(), {0, 0}));
    EXPECT_EQ(iota(k, a, Side::Primal), delta_floor(a));
    // the threshold stabilizes the definitional approximation below it
    for (auto& ys : oracle::all_subsets(support_floor(a)))
        for (auto* d : {"0.1", "0.05", "0.01"})
            EXPECT_EQ(approx_at(mn, a, q(d), ys), approx_primal(mn, a)(ys));
}

TEST(Iota, GapWhenDeltaIsLarge) {
    auto y = Universe::make({"a", "b"}), z = Universe::make({"m"});
    Valuation a(y, Chain::unit(), {q("0.1"), q("0.3")});
    auto mn = fn::min_rel(y, z, Chain::unit(), {{0, 1}});
    EXPECT_EQ(iota(mn, a, Side::Primal), q("0.2"));
    // at δ above the gap, b overtakes a and the image changes
    EXPECT_EQ(approx_at(mn, a, q("0.2"), Subset::of(y, {"a"})), Subset::full(z));
    EXPECT_TRUE(approx_at(mn, a, q("0.25"), Subset::of(y, {"a"})).empty());
}

TEST(Nonexpansive, ToolboxPasses) {
    oracle::Rng rng(21);
    oracle::ExprGen gen(rng, Chain::unit());
    for (int i = 0; i < 30; ++i) {
        auto f = gen.build(gen.universe(size_t(oracle::rint(rng, 1, 5))), 3);
        auto rep = check_nonexpansive(f, 1000, 100 + i);
        EXPECT_TRUE(rep.ok);
    }
}

TEST(Nonexpansive, DetectsScaling) {
    auto u = Universe::make({"y"});
    auto twice = [&](const Valuation& a) { return Valuation(u, Chain::unit(), {std::min(Rational(2 * a[0]), Rational(1))}); };
    auto rep = check_nonexpansive(twice, u, Chain::unit(), 200, 1);
    ASSERT_FALSE(rep.ok);
    EXPECT_GT(rep.output_gap, rep.input_gap);
    auto id = [](const Valuation& a) { return a; };
    EXPECT_TRUE(check_nonexpansive(id, u, Chain::unit(), 50, 1).ok);
}

// Closed forms against the definition at ι̂, plus anti-monotonicity, soundness and monotonicity.
class ApproxProperties : public ::testing::TestWithParam<Chain> {};

TEST_P(ApproxProperties, ClosedFormMatchesDefinition) {
    Chain ch = GetParam();
    oracle::Rng rng(ch.kind == ChainKind::Unit ? 31 : 32);
    oracle::ExprGen gen(rng, ch);
    for (int i = 0; i < 60; ++i) {
        auto f = gen.build(gen.universe(size_t(oracle::rint(rng, 1, 6))), 3);
        auto a = random_valuation(f->dom, ch, rng, 6);
        for (Side side : {Side::Primal, Side::Dual}) {
            Rational th = iota(f, a, side);
            ASSERT_GT(th, 0);
            auto g = approx(f, a, side);
            auto top = side == Side::Primal ? support_floor(a) : support_ceil(a);
            auto subsets = oracle::all_subsets(top);
            for (auto& ys : subsets) {
                auto img = g(ys);
                ASSERT_EQ(img, oracle::definitional_approx(evaluator(f), a, th, ys, side)) << "expr " << i;
                for (auto& zs : subsets)
                    if (ys.subset_of(zs)) ASSERT_TRUE(img.subset_of(g(zs)));
            }
        }
    }
}

TEST_P(ApproxProperties, AntiMonotoneInDelta) {
    Chain ch = GetParam();
    oracle::Rng rng(41);
    oracle::ExprGen gen(rng, ch);
    for (int i = 0; i < 40; ++i) {
        auto f = gen.build(gen.universe(size_t(oracle::rint(rng, 1, 5))), 3);
        auto a = random_valuation(f->dom, ch, rng, 6);
        Rational cap = delta_floor(a);
        std::vector<Rational> grid;
        for (int k = 1; k <= 5; ++k) grid.push_back(cap * k / 5);
        for (auto& ys : oracle::all_subsets(support_floor(a)))
            for (size_t s = 0; s < grid.size(); ++s)
                for (size_t t = s; t < grid.size(); ++t) {
                    if (ch.kind != ChainKind::Unit && (grid[s].get_den() != 1 || grid[t].get_den() != 1)) continue;
                    ASSERT_TRUE(approx_at(f, a, grid[t], ys).subset_of(approx_at(f, a, grid[s], ys)));
                }
    }
}

INSTANTIATE_TEST_SUITE_P(Chains, ApproxProperties, ::testing::Values(Chain::unit(), Chain::bounded(4)));

TEST(ApproxSoundness, GammaSquare) {
    oracle::Rng rng(51);
    oracle::ExprGen gen(rng, Chain::unit());
    for (int i = 0; i < 60; ++i) {
        auto f = gen.build(gen.universe(size_t(oracle::rint(rng, 1, 5))), 3);
        auto a = random_valuation(f->dom, Chain::unit(), rng, 6);
        Rational d = delta_floor(a) * oracle::rand_unit(rng, 4);
        if (d == 0) continue;
        // random b in [a, a⊕δ]
        std::vector<Rational> bv(a.size());
        for (size_t y = 0; y < a.size(); ++y)
            bv[y] = a[y] == 1 ? Rational(1) : Rational(a[y] + d * oracle::rint(rng, 0, 2) / 2);
        Valuation b(a.universe(), Chain::unit(), bv);
        auto lhs = gamma(eval(f, a), d, eval(f, b));
        auto rhs = approx_primal(f, a)(gamma(a, d, b));
        EXPECT_TRUE(lhs.subset_of(rhs)) << "expr " << i;
    }
}

TEST(ApproxDuality, DualIsPrimalOfOrderDual) {
    oracle::Rng rng(61);
    oracle::ExprGen gen(rng, Chain::unit());
    for (int i = 0; i < 40; ++i) {
        auto f = gen.build(gen.universe(size_t(oracle::rint(rng, 1, 5))), 3);
        auto a = random_valuation(f->dom, Chain::unit(), rng, 6);
        auto fd = order_dual(f);
        EXPECT_EQ(eval(fd, a.comp()), eval(f, a).comp());
        for (auto& ys : oracle::all_subsets(support_ceil(a)))
            ASSERT_EQ(approx_dual(f, a)(ys), approx_primal(fd, a.comp())(ys));
        EXPECT_EQ(iota(f, a, Side::Dual), iota(fd, a.comp(), Side::Primal));
    }
}
