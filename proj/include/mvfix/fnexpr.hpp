#pragma once
// Toolbox of non-expansive functions M^Y -> M^Z, their Galois pair, and their approximations.
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mvfix/mv.hpp"

namespace mvfix {

enum class Side { Primal, Dual };

struct UnsupportedClosedForm : std::logic_error {
    using std::logic_error::logic_error;
};

// A monotone map P(dom) -> P(cod); in practice an approximation f_a^# or f_#^a.
struct SetFn {
    UniversePtr dom, cod;
    std::function<Subset(const Subset&)> fn;
    Subset operator()(const Subset& s) const { return fn(s); }
};

struct Distribution {
    std::vector<std::pair<size_t, Rational>> w;  // sorted by index, positive weights
    Subset support(const UniversePtr& u) const {
        Subset s(u);
        for (auto& [i, p] : w) s.insert(i);
        return s;
    }
    bool operator==(const Distribution&) const = default;
};

inline Distribution make_distribution(std::vector<std::pair<size_t, Rational>> w) {
    std::sort(w.begin(), w.end(), [](auto& x, auto& y) { return x.first < y.first; });
    Distribution d;
    Rational total = 0;
    for (auto& [i, p] : w) {
        if (p < 0) throw PreconditionError("negative probability");
        total += p;
        if (p == 0) continue;
        if (!d.w.empty() && d.w.back().first == i)
            d.w.back().second += p;
        else
            d.w.emplace_back(i, p);
    }
    if (total != 1) throw PreconditionError("distribution sums to " + format_rational(total) + ", not 1");
    return d;
}

enum class FnKind { Constant, Reindex, MinRel, MaxRel, Average, Translate, Compose, DisjointUnion };

struct FnExpr;
using FnPtr = std::shared_ptr<const FnExpr>;

struct UnionPart {
    FnPtr f;
    std::vector<size_t> dom_map;  // part domain index -> outer domain index
    std::vector<size_t> cod_map;  // part codomain index -> outer codomain index
};

struct FnExpr {
    FnKind kind;
    UniversePtr dom, cod;
    Chain chain;

    Valuation k;                           // Constant
    std::vector<size_t> u;                 // Reindex: z -> u(z)
    std::vector<std::vector<size_t>> rel;  // MinRel/MaxRel: z -> R^{-1}(z)
    std::vector<Distribution> dists;       // Average: one distribution per z
    Rational c;                            // Translate
    bool up = false;
    FnPtr outer, inner;                    // Compose: outer ∘ inner
    std::vector<UnionPart> parts;          // DisjointUnion
};

namespace fn {

inline void check_index(size_t i, const UniversePtr& u, const char* what) {
    if (i >= u->size()) throw PreconditionError(std::string(what) + ": index out of range");
}

inline FnPtr constant(UniversePtr dom, Valuation k) {
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::Constant;
    f->dom = std::move(dom);
    f->cod = k.universe();
    f->chain = k.chain();
    f->k = std::move(k);
    return f;
}

inline FnPtr reindex(UniversePtr dom, UniversePtr cod, Chain chain, std::vector<size_t> u) {
    if (u.size() != cod->size()) throw PreconditionError("reindex map must be total on the codomain");
    for (size_t y : u) check_index(y, dom, "reindex");
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::Reindex;
    f->dom = std::move(dom);
    f->cod = std::move(cod);
    f->chain = chain;
    f->u = std::move(u);
    return f;
}

inline FnPtr relation(FnKind kind, UniversePtr dom, UniversePtr cod, Chain chain,
                      std::vector<std::vector<size_t>> rel) {
    if (rel.size() != cod->size()) throw PreconditionError("relation needs one preimage list per codomain element");
    for (auto& ys : rel) {
        for (size_t y : ys) check_index(y, dom, "relation");
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    }
    auto f = std::make_shared<FnExpr>();
    f->kind = kind;
    f->dom = std::move(dom);
    f->cod = std::move(cod);
    f->chain = chain;
    f->rel = std::move(rel);
    return f;
}
inline FnPtr min_rel(UniversePtr dom, UniversePtr cod, Chain chain, std::vector<std::vector<size_t>> rel) {
    return relation(FnKind::MinRel, std::move(dom), std::move(cod), chain, std::move(rel));
}
inline FnPtr max_rel(UniversePtr dom, UniversePtr cod, Chain chain, std::vector<std::vector<size_t>> rel) {
    return relation(FnKind::MaxRel, std::move(dom), std::move(cod), chain, std::move(rel));
}

inline FnPtr average(UniversePtr dom, UniversePtr cod, Chain chain, std::vector<Distribution> dists) {
    if (chain.kind != ChainKind::Unit) throw PreconditionError("average is only defined over the unit chain");
    if (dists.size() != cod->size()) throw PreconditionError("average needs one distribution per codomain element");
    for (auto& d : dists) {
        Rational total = 0;
        for (auto& [y, p] : d.w) {
            check_index(y, dom, "average");
            if (p <= 0) throw PreconditionError("distribution weights must be positive");
            total += p;
        }
        if (total != 1) throw PreconditionError("distribution does not sum to 1");
    }
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::Average;
    f->dom = std::move(dom);
    f->cod = std::move(cod);
    f->chain = chain;
    f->dists = std::move(dists);
    return f;
}

inline FnPtr translate(UniversePtr dom, Chain chain, Rational c, bool up) {
    if (!chain.contains(c)) throw PreconditionError("translation amount outside the chain");
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::Translate;
    f->dom = dom;
    f->cod = std::move(dom);
    f->chain = chain;
    f->c = std::move(c);
    f->up = up;
    return f;
}

inline FnPtr compose(FnPtr outer, FnPtr inner) {
    if (!same_universe(inner->cod, outer->dom)) throw PreconditionError("compose: codomain(g) != domain(h)");
    if (!(inner->chain == outer->chain)) throw VariantMismatch("compose: chain mismatch");
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::Compose;
    f->dom = inner->dom;
    f->cod = outer->cod;
    f->chain = inner->chain;
    f->outer = std::move(outer);
    f->inner = std::move(inner);
    return f;
}

inline FnPtr disjoint_union(UniversePtr dom, UniversePtr cod, std::vector<UnionPart> parts) {
    if (parts.empty()) throw PreconditionError("disjoint union needs at least one part");
    std::vector<char> covered_dom(dom->size(), 0), covered_cod(cod->size(), 0);
    for (auto& p : parts) {
        if (!(p.f->chain == parts[0].f->chain)) throw VariantMismatch("disjoint union: chain mismatch");
        if (p.dom_map.size() != p.f->dom->size() || p.cod_map.size() != p.f->cod->size())
            throw PreconditionError("disjoint union: embedding size mismatch");
        for (size_t y : p.dom_map) {
            check_index(y, dom, "disjoint union domain");
            covered_dom[y] = 1;
        }
        for (size_t z : p.cod_map) {
            check_index(z, cod, "disjoint union codomain");
            if (covered_cod[z]) throw PreconditionError("disjoint union: codomains overlap");
            covered_cod[z] = 1;
        }
    }
    for (char c : covered_dom)
        if (!c) throw PreconditionError("disjoint union: domain is not the union of part domains");
    for (char c : covered_cod)
        if (!c) throw PreconditionError("disjoint union: codomain not covered");
    auto f = std::make_shared<FnExpr>();
    f->kind = FnKind::DisjointUnion;
    f->dom = std::move(dom);
    f->cod = std::move(cod);
    f->chain = parts[0].f->chain;
    f->parts = std::move(parts);
    return f;
}

}  // namespace fn

inline Valuation restrict_to_part(const Valuation& a, const UnionPart& p) {
    return a.restrict(p.f->dom, p.dom_map);
}
inline Subset restrict_to_part(const Subset& s, const UnionPart& p) {
    Subset r(p.f->dom);
    for (size_t j = 0; j < p.dom_map.size(); ++j)
        if (s.contains(p.dom_map[j])) r.insert(j);
    return r;
}

inline Valuation eval(const FnExpr& f, const Valuation& a) {
    if (!same_universe(a.universe(), f.dom)) throw PreconditionError("eval: valuation universe != function domain");
    if (!(a.chain() == f.chain)) throw VariantMismatch("eval: chain mismatch");
    const Chain& ch = f.chain;
    switch (f.kind) {
        case FnKind::Constant:
            return f.k;
        case FnKind::Reindex: {
            std::vector<Rational> out;
            out.reserve(f.u.size());
            for (size_t y : f.u) out.push_back(a[y]);
            return Valuation(f.cod, ch, std::move(out));
        }
        case FnKind::MinRel:
        case FnKind::MaxRel: {
            bool is_min = f.kind == FnKind::MinRel;
            std::vector<Rational> out;
            out.reserve(f.rel.size());
            for (auto& ys : f.rel) {
                Rational m = is_min ? ch.top() : Rational(0);
                for (size_t y : ys) m = is_min ? std::min(m, a[y]) : std::max(m, a[y]);
                out.push_back(m);
            }
            return Valuation(f.cod, ch, std::move(out));
        }
        case FnKind::Average: {
            std::vector<Rational> out;
            out.reserve(f.dists.size());
            for (auto& d : f.dists) {
                Rational s = 0;
                for (auto& [y, p] : d.w) s += p * a[y];
                out.push_back(s);
            }
            return Valuation(f.cod, ch, std::move(out));
        }
        case FnKind::Translate: {
            auto c = Valuation::constant(a.universe(), ch, f.c);
            return f.up ? a.oplus(c) : a.ominus(c);
        }
        case FnKind::Compose:
            return eval(*f.outer, eval(*f.inner, a));
        case FnKind::DisjointUnion: {
            std::vector<Rational> out(f.cod->size());
            for (auto& p : f.parts) {
                Valuation r = eval(*p.f, restrict_to_part(a, p));
                for (size_t j = 0; j < p.cod_map.size(); ++j) out[p.cod_map[j]] = r[j];
            }
            return Valuation(f.cod, ch, std::move(out));
        }
    }
    throw std::logic_error("unreachable");
}
inline Valuation eval(const FnPtr& f, const Valuation& a) { return eval(*f, a); }

// Galois pair. alpha adds δ on Y' (dual: subtracts), gamma reads back where the gap reaches δ.
inline Valuation alpha(const Valuation& a, const Rational& delta, const Subset& ys) {
    if (delta <= 0) throw PreconditionError("alpha: δ must be positive");
    if (!ys.subset_of(support_floor(a))) throw PreconditionError("alpha: Y' outside [Y]^a");
    return a.oplus_on(ys, delta);
}
inline Valuation alpha_dual(const Valuation& a, const Rational& theta, const Subset& ys) {
    if (theta <= 0) throw PreconditionError("alpha_dual: θ must be positive");
    if (!ys.subset_of(support_ceil(a))) throw PreconditionError("alpha_dual: Y' outside [Y]_a");
    return a.ominus_on(ys, theta);
}

inline Subset gamma(const Valuation& a, const Rational& delta, const Valuation& b) {
    auto upper = a.oplus(Valuation::constant(a.universe(), a.chain(), std::min(delta, a.chain().top())));
    if (!a.leq(b) || !b.leq(upper)) throw PreconditionError("gamma: b outside [a, a⊕δ]");
    Subset s(a.universe());
    const Chain& ch = a.chain();
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != ch.top() && mv_sub(ch, b[i], a[i]) >= delta) s.insert(i);
    return s;
}
inline Subset gamma_dual(const Valuation& a, const Rational& theta, const Valuation& b) {
    auto lower = a.ominus(Valuation::constant(a.universe(), a.chain(), std::min(theta, a.chain().top())));
    if (!b.leq(a) || !lower.leq(b)) throw PreconditionError("gamma_dual: b outside [a⊖θ, a]");
    Subset s(a.universe());
    const Chain& ch = a.chain();
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && mv_sub(ch, a[i], b[i]) >= theta) s.insert(i);
    return s;
}

// Definitional (δ,a)-approximation: γ_{f(a),δ} ∘ f ∘ α_{a,δ}.
template <class Eval>
Subset approx_at_with(Eval&& f, const Valuation& a, const Rational& delta, const Subset& ys, Side side) {
    if (side == Side::Primal) return gamma(f(a), delta, f(alpha(a, delta, ys)));
    return gamma_dual(f(a), delta, f(alpha_dual(a, delta, ys)));
}
inline Subset approx_at(const FnPtr& f, const Valuation& a, const Rational& delta, const Subset& ys) {
    return approx_at_with([&](const Valuation& v) { return eval(*f, v); }, a, delta, ys, Side::Primal);
}
inline Subset approx_dual_at(const FnPtr& f, const Valuation& a, const Rational& theta, const Subset& ys) {
    return approx_at_with([&](const Valuation& v) { return eval(*f, v); }, a, theta, ys, Side::Dual);
}

namespace detail {

inline Subset support(const Valuation& a, Side side) {
    return side == Side::Primal ? support_floor(a) : support_ceil(a);
}
inline Rational delta(const Valuation& a, Side side) {
    return side == Side::Primal ? delta_floor(a) : delta_ceil(a);
}

// Min_{a|ys} or Max_{a|ys}
inline std::vector<size_t> extremal(const Valuation& a, const std::vector<size_t>& ys, bool is_min) {
    std::vector<size_t> out;
    if (ys.empty()) return out;
    Rational best = a[ys[0]];
    for (size_t y : ys) best = is_min ? std::min(best, a[y]) : std::max(best, a[y]);
    for (size_t y : ys)
        if (a[y] == best) out.push_back(y);
    return out;
}

}  // namespace detail

// Closed-form a-approximation by structural recursion (primal f_a^#, dual f_#^a).
inline SetFn approx(const FnPtr& f, const Valuation& a, Side side) {
    Valuation fa = eval(*f, a);
    Subset dom_sup = detail::support(a, side);
    Subset cod_sup = detail::support(fa, side);
    SetFn out{f->dom, f->cod, {}};

    switch (f->kind) {
        case FnKind::Constant:
            out.fn = [cod = f->cod](const Subset&) { return Subset(cod); };
            return out;
        case FnKind::Reindex:
            out.fn = [f, dom_sup, cod_sup](const Subset& ys) {
                Subset in = ys & dom_sup, r(f->cod);
                for (size_t z : cod_sup.elements())
                    if (in.contains(f->u[z])) r.insert(z);
                return r;
            };
            return out;
        case FnKind::MinRel:
        case FnKind::MaxRel: {
            bool is_min = f->kind == FnKind::MinRel;
            std::vector<std::vector<size_t>> ext(f->rel.size());
            for (size_t z = 0; z < f->rel.size(); ++z) ext[z] = detail::extremal(a, f->rel[z], is_min);
            // primal: Min ⊆ Y' for min, Max ∩ Y' ≠ ∅ for max; the dual swaps the two tests
            bool need_all = (is_min == (side == Side::Primal));
            out.fn = [f, ext, dom_sup, cod_sup, need_all](const Subset& ys) {
                Subset in = ys & dom_sup, r(f->cod);
                for (size_t z : cod_sup.elements()) {
                    const auto& e = ext[z];
                    bool ok = need_all ? std::all_of(e.begin(), e.end(), [&](size_t y) { return in.contains(y); })
                                       : std::any_of(e.begin(), e.end(), [&](size_t y) { return in.contains(y); });
                    if (ok && !e.empty()) r.insert(z);
                }
                return r;
            };
            return out;
        }
        case FnKind::Average:
            out.fn = [f, dom_sup, cod_sup](const Subset& ys) {
                Subset in = ys & dom_sup, r(f->cod);
                for (size_t z : cod_sup.elements()) {
                    const auto& w = f->dists[z].w;
                    if (std::all_of(w.begin(), w.end(), [&](auto& e) { return in.contains(e.first); })) r.insert(z);
                }
                return r;
            };
            return out;
        case FnKind::Translate:
            throw UnsupportedClosedForm("translate has no closed-form approximation; use approx_at");
        case FnKind::Compose: {
            SetFn g = approx(f->inner, a, side);
            SetFn h = approx(f->outer, eval(*f->inner, a), side);
            out.fn = [g, h, dom_sup](const Subset& ys) { return h(g(ys & dom_sup)); };
            return out;
        }
        case FnKind::DisjointUnion: {
            std::vector<SetFn> fs;
            for (auto& p : f->parts) fs.push_back(approx(p.f, restrict_to_part(a, p), side));
            out.fn = [f, fs, dom_sup](const Subset& ys) {
                Subset in = ys & dom_sup, r(f->cod);
                for (size_t i = 0; i < fs.size(); ++i) {
                    const auto& p = f->parts[i];
                    Subset img = fs[i](restrict_to_part(in, p));
                    for (size_t j : img.elements()) r.insert(p.cod_map[j]);
                }
                return r;
            };
            return out;
        }
    }
    throw std::logic_error("unreachable");
}
inline SetFn approx_primal(const FnPtr& f, const Valuation& a) { return approx(f, a, Side::Primal); }
inline SetFn approx_dual(const FnPtr& f, const Valuation& a) { return approx(f, a, Side::Dual); }

// Conservative threshold 0 ⊏ ι̂ ⊑ ι_a^f, computed structurally.
inline Rational iota(const FnPtr& f, const Valuation& a, Side side) {
    const Chain& ch = f->chain;
    Rational d = detail::delta(a, side);
    switch (f->kind) {
        case FnKind::Constant:
        case FnKind::Reindex:
        case FnKind::Average:
            return d;
        case FnKind::MinRel:
        case FnKind::MaxRel: {
            bool is_min = f->kind == FnKind::MinRel;
            // gaps only matter where the approximation needs all extremal points
            if (is_min != (side == Side::Primal)) return d;
            Valuation fa = eval(*f, a);
            Subset cod_sup = detail::support(fa, side);
            Rational best = d;
            for (size_t z : cod_sup.elements()) {
                const Rational& m = fa[z];
                for (size_t y : f->rel[z]) {
                    Rational gap = is_min ? a[y] - m : m - a[y];
                    if (gap > 0) best = std::min(best, gap);
                }
            }
            return best;
        }
        case FnKind::Translate: {
            Rational best = d;
            if (side == Side::Primal && f->up) {
                for (size_t y = 0; y < a.size(); ++y)
                    if (a[y] + f->c < ch.top()) best = std::min(best, Rational(ch.top() - a[y] - f->c));
            } else if (side == Side::Dual && !f->up) {
                for (size_t y = 0; y < a.size(); ++y)
                    if (a[y] > f->c) best = std::min(best, Rational(a[y] - f->c));
            }
            return best;
        }
        case FnKind::Compose: {
            Rational g = iota(f->inner, a, side);
            Rational h = iota(f->outer, eval(*f->inner, a), side);
            return std::min({d, g, h});
        }
        case FnKind::DisjointUnion: {
            Rational best = d;
            for (auto& p : f->parts) best = std::min(best, iota(p.f, restrict_to_part(a, p), side));
            return best;
        }
    }
    throw std::logic_error("unreachable");
}

// The same function read in the order-reversed chain: dual(f)(comp a) = comp(f(a)).
inline FnPtr order_dual(const FnPtr& f) {
    switch (f->kind) {
        case FnKind::Constant:
            return fn::constant(f->dom, f->k.comp());
        case FnKind::Reindex:
        case FnKind::Average:
            return f;
        case FnKind::MinRel:
            return fn::max_rel(f->dom, f->cod, f->chain, f->rel);
        case FnKind::MaxRel:
            return fn::min_rel(f->dom, f->cod, f->chain, f->rel);
        case FnKind::Translate:
            return fn::translate(f->dom, f->chain, f->c, !f->up);
        case FnKind::Compose:
            return fn::compose(order_dual(f->outer), order_dual(f->inner));
        case FnKind::DisjointUnion: {
            auto parts = f->parts;
            for (auto& p : parts) p.f = order_dual(p.f);
            return fn::disjoint_union(f->dom, f->cod, std::move(parts));
        }
    }
    throw std::logic_error("unreachable");
}

inline Valuation random_valuation(const UniversePtr& u, const Chain& ch, std::mt19937_64& rng, long max_den = 12) {
    std::vector<Rational> v(u->size());
    for (auto& x : v) {
        if (ch.kind == ChainKind::Unit) {
            long den = std::uniform_int_distribution<long>(1, max_den)(rng);
            x = Rational(std::uniform_int_distribution<long>(0, den)(rng), den);
        } else {
            x = Rational(std::uniform_int_distribution<long>(0, ch.k)(rng));
        }
        x.canonicalize();
    }
    return Valuation(u, ch, std::move(v));
}

struct NonexpansiveReport {
    bool ok = true;
    std::optional<Valuation> a, b;
    Rational input_gap, output_gap;
};

// Samples pairs and checks ‖f(b)⊖f(a)‖ ⊑ ‖b⊖a‖ in both directions.
inline NonexpansiveReport check_nonexpansive(const std::function<Valuation(const Valuation&)>& f,
                                             const UniversePtr& dom, const Chain& ch, int trials,
                                             unsigned long seed) {
    std::mt19937_64 rng(seed);
    NonexpansiveReport rep;
    for (int t = 0; t < trials; ++t) {
        Valuation a = random_valuation(dom, ch, rng);
        Valuation b = random_valuation(dom, ch, rng);
        if (t % 2) {  // nearby pairs expose local expansion
            b = a;
            for (size_t i = 0; i < a.size(); ++i)
                if (rng() % 2) b.set(i, mv_add(ch, a[i], ch.kind == ChainKind::Unit ? Rational(1, 10) : Rational(1)));
        }
        Valuation fa = f(a), fb = f(b);
        for (int dir = 0; dir < 2; ++dir) {
            Rational in = norm(b.ominus(a)), out = norm(fb.ominus(fa));
            if (out > in) {
                rep.ok = false;
                rep.a = a;
                rep.b = b;
                rep.input_gap = in;
                rep.output_gap = out;
                return rep;
            }
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return rep;
}
inline NonexpansiveReport check_nonexpansive(const FnPtr& f, int trials, unsigned long seed) {
    return check_nonexpansive([&](const Valuation& a) { return eval(*f, a); }, f->dom, f->chain, trials, seed);
}

}  // namespace mvfix
