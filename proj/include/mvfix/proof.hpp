#pragma once
// Powerset fixpoints, the four proof rules, and jumps off non-extremal fixpoints.
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mvfix/fnexpr.hpp"

namespace mvfix {

// An endofunction f : M^Y -> M^Y together with its approximations.
class FixpointFunction {
public:
    virtual ~FixpointFunction() = default;
    virtual UniversePtr universe() const = 0;
    virtual Chain chain() const = 0;
    virtual Valuation eval(const Valuation& a) const = 0;
    virtual SetFn approx(const Valuation& a, Side side) const = 0;
    virtual Rational iota(const Valuation& a, Side side) const = 0;
};

// Wraps a toolbox expression. Falls back to the definitional approximation at ι̂
// when the expression contains a leaf without a closed form.
class ExprFunction : public FixpointFunction {
public:
    explicit ExprFunction(FnPtr f) : f_(std::move(f)) {
        if (!same_universe(f_->dom, f_->cod)) throw PreconditionError("fixpoint function must be an endofunction");
    }
    UniversePtr universe() const override { return f_->dom; }
    Chain chain() const override { return f_->chain; }
    Valuation eval(const Valuation& a) const override { return mvfix::eval(*f_, a); }
    SetFn approx(const Valuation& a, Side side) const override {
        try {
            return mvfix::approx(f_, a, side);
        } catch (const UnsupportedClosedForm&) {
            Rational th = iota(a, side);
            auto f = f_;
            return SetFn{f_->dom, f_->cod, [f, a, th, side](const Subset& ys) {
                             Subset in = ys & (side == Side::Primal ? support_floor(a) : support_ceil(a));
                             return side == Side::Primal ? approx_at(f, a, th, in) : approx_dual_at(f, a, th, in);
                         }};
        }
    }
    Rational iota(const Valuation& a, Side side) const override { return mvfix::iota(f_, a, side); }
    const FnPtr& expr() const { return f_; }

private:
    FnPtr f_;
};

// Kleene descent from top; |top|+1 rounds at most.
inline Subset gfp_setfn(const SetFn& g, const Subset& top) {
    Subset x = top;
    for (;;) {
        Subset next = g(x) & top;
        if (next == x) return x;
        x = std::move(next);
    }
}

enum class Verdict { Certified, Refuted, Inconclusive, Inapplicable };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "certified";
        case Verdict::Refuted: return "refuted";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Inapplicable: return "inapplicable";
    }
    return "?";
}

struct Certificate {
    Verdict verdict = Verdict::Inapplicable;
    Subset witness;
    std::optional<Rational> theta;
    std::string note;
};

namespace detail {

inline Certificate from_witness(Subset w, Verdict on_nonempty, std::string note = {}) {
    Certificate c;
    c.verdict = w.empty() ? Verdict::Certified : on_nonempty;
    c.witness = std::move(w);
    c.note = std::move(note);
    return c;
}

inline Certificate inapplicable(const UniversePtr& u, std::string why) {
    Certificate c;
    c.verdict = Verdict::Inapplicable;
    c.witness = Subset(u);
    c.note = std::move(why);
    return c;
}

// {y in the support | a(y) = f(a)(y)}
inline Subset agree_support(const Valuation& a, const Valuation& fa, Side side) {
    Subset s = side == Side::Primal ? support_floor(a) : support_ceil(a);
    for (size_t i : s.elements())
        if (a[i] != fa[i]) s.erase(i);
    return s;
}

}  // namespace detail

// ν f_a^# = ∅ iff a = νf
inline Certificate is_greatest_fixpoint(const FixpointFunction& f, const Valuation& a) {
    if (!(f.eval(a) == a)) return detail::inapplicable(a.universe(), "not a fixpoint");
    return detail::from_witness(gfp_setfn(f.approx(a, Side::Primal), support_floor(a)), Verdict::Refuted);
}
// ν f_#^a = ∅ iff a = μf
inline Certificate is_least_fixpoint(const FixpointFunction& f, const Valuation& a) {
    if (!(f.eval(a) == a)) return detail::inapplicable(a.universe(), "not a fixpoint");
    return detail::from_witness(gfp_setfn(f.approx(a, Side::Dual), support_ceil(a)), Verdict::Refuted);
}

// Pre-fixpoint rule: ν f_a^* = ∅ implies νf ⊑ a. A non-empty witness is only inconclusive.
inline Certificate certify_upper_bound(const FixpointFunction& f, const Valuation& a) {
    Valuation fa = f.eval(a);
    if (!fa.leq(a)) return detail::inapplicable(a.universe(), "not a pre-fixpoint");
    Subset top = detail::agree_support(a, fa, Side::Primal);
    SetFn g = f.approx(a, Side::Primal);
    SetFn star{g.dom, g.cod, [g, top](const Subset& ys) { return g(ys) & top; }};
    return detail::from_witness(gfp_setfn(star, top), Verdict::Inconclusive,
                                "the pre-fixpoint rule is sound but not complete");
}
// Post-fixpoint rule: ν f_*^a = ∅ implies a ⊑ μf.
inline Certificate certify_lower_bound(const FixpointFunction& f, const Valuation& a) {
    Valuation fa = f.eval(a);
    if (!a.leq(fa)) return detail::inapplicable(a.universe(), "not a post-fixpoint");
    Subset top = detail::agree_support(a, fa, Side::Dual);
    SetFn g = f.approx(a, Side::Dual);
    SetFn star{g.dom, g.cod, [g, top](const Subset& ys) { return g(ys) & top; }};
    return detail::from_witness(gfp_setfn(star, top), Verdict::Inconclusive,
                                "the post-fixpoint rule is sound but not complete");
}

struct NothingToImprove : std::logic_error {
    using std::logic_error::logic_error;
};

struct Jump {
    Valuation value;
    Rational theta;
    Subset witness;
};

namespace detail {

// Start at ι̂, double while the side condition holds, never beyond δ(Y').
inline Jump jump(const FixpointFunction& f, const Valuation& a, Side side) {
    if (!(f.eval(a) == a)) throw PreconditionError("jump: not a fixpoint");
    Subset top = side == Side::Primal ? support_floor(a) : support_ceil(a);
    Subset w = gfp_setfn(f.approx(a, side), top);
    if (w.empty()) throw NothingToImprove("the approximation has an empty greatest fixpoint");

    Rational cap = side == Side::Primal ? delta_floor_on(a, w) : delta_ceil_on(a, w);
    Rational theta = std::min(f.iota(a, side), cap);
    auto shift = [&](const Rational& th) { return side == Side::Primal ? a.oplus_on(w, th) : a.ominus_on(w, th); };
    auto ok = [&](const Valuation& b) {
        Valuation fb = f.eval(b);
        return side == Side::Primal ? b.leq(fb) : fb.leq(b);
    };
    Valuation b = shift(theta);
    if (!ok(b)) throw std::logic_error("jump at ι̂ did not produce a " + std::string(side == Side::Primal ? "post" : "pre") + "-fixpoint");
    while (2 * theta <= cap) {
        Valuation c = shift(2 * theta);
        if (!ok(c)) break;
        theta *= 2;
        b = std::move(c);
    }
    return {std::move(b), theta, std::move(w)};
}

}  // namespace detail

inline Jump improve_post_fixpoint(const FixpointFunction& f, const Valuation& a) {
    return detail::jump(f, a, Side::Primal);
}
inline Jump improve_pre_fixpoint(const FixpointFunction& f, const Valuation& a) {
    return detail::jump(f, a, Side::Dual);
}

// Maps a post-fixpoint to the least fixpoint above it (dual: pre-fixpoint to the greatest below).
using InnerSolver = std::function<Valuation(const Valuation&)>;

enum class Extremum { Greatest, Least };

struct ExtremalResult {
    Valuation value;
    int jumps = 0;
    int inner_solves = 0;
};

inline ExtremalResult extremal_fixpoint_via_jumps(const FixpointFunction& f, const Valuation& a0,
                                                  const InnerSolver& inner, Extremum which,
                                                  int max_rounds = 100000) {
    ExtremalResult r{a0, 0, 0};
    for (int round = 0; round < max_rounds; ++round) {
        r.value = inner(r.value);
        ++r.inner_solves;
        Certificate c = which == Extremum::Greatest ? is_greatest_fixpoint(f, r.value) : is_least_fixpoint(f, r.value);
        if (c.verdict == Verdict::Inapplicable) throw std::logic_error("inner solver did not return a fixpoint");
        if (c.verdict == Verdict::Certified) return r;
        r.value = (which == Extremum::Greatest ? improve_post_fixpoint(f, r.value) : improve_pre_fixpoint(f, r.value)).value;
        ++r.jumps;
    }
    throw std::runtime_error("extremal_fixpoint_via_jumps: round limit reached");
}

}  // namespace mvfix
