#pragma once
// MV-chains, universes, subsets and valuations.
#include <algorithm>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "mvfix/rational.hpp"

namespace mvfix {

struct VariantMismatch : std::logic_error {
    using std::logic_error::logic_error;
};
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// The unit interval, {0..k}, or {0,1}. Every variant is stored as a rational in [0, top].
enum class ChainKind { Unit, Bounded, Bool };

struct Chain {
    ChainKind kind = ChainKind::Unit;
    long k = 1;

    static Chain unit() { return {ChainKind::Unit, 1}; }
    static Chain bounded(long k) {
        if (k < 1) throw PreconditionError("bounded chain needs k >= 1");
        return {ChainKind::Bounded, k};
    }
    static Chain boolean() { return {ChainKind::Bool, 1}; }

    Rational top() const { return Rational(k); }
    bool operator==(const Chain&) const = default;

    bool contains(const Rational& x) const {
        if (x < 0 || x > top()) return false;
        return kind == ChainKind::Unit || x.get_den() == 1;
    }
    std::string name() const {
        switch (kind) {
            case ChainKind::Unit: return "unit";
            case ChainKind::Bool: return "bool";
            case ChainKind::Bounded: return "bounded:" + std::to_string(k);
        }
        return "?";
    }
};

inline Rational mv_add(const Chain& c, const Rational& x, const Rational& y) {
    Rational s = x + y;
    return s > c.top() ? c.top() : s;
}
inline Rational mv_sub(const Chain&, const Rational& x, const Rational& y) {
    Rational s = x - y;
    return s < 0 ? Rational(0) : s;
}
inline Rational mv_mul(const Chain& c, const Rational& x, const Rational& y) {
    Rational s = x + y - c.top();
    return s < 0 ? Rational(0) : s;
}
inline Rational mv_comp(const Chain& c, const Rational& x) { return c.top() - x; }

struct MVValue {
    Chain chain;
    Rational v;

    MVValue() = default;
    MVValue(Chain c, Rational x) : chain(c), v(std::move(x)) {
        v.canonicalize();
        if (!chain.contains(v))
            throw PreconditionError(format_rational(v) + " is not in chain " + chain.name());
    }
    static MVValue zero(Chain c) { return {c, 0}; }
    static MVValue one(Chain c) { return {c, c.top()}; }

    bool operator==(const MVValue& o) const { return chain == o.chain && v == o.v; }
    std::string str() const { return format_rational(v); }
};

inline const Chain& same_chain(const MVValue& x, const MVValue& y) {
    if (!(x.chain == y.chain))
        throw VariantMismatch("chain " + x.chain.name() + " vs " + y.chain.name());
    return x.chain;
}
inline MVValue mv_add(const MVValue& x, const MVValue& y) {
    const Chain& c = same_chain(x, y);
    return {c, mv_add(c, x.v, y.v)};
}
inline MVValue mv_sub(const MVValue& x, const MVValue& y) {
    const Chain& c = same_chain(x, y);
    return {c, mv_sub(c, x.v, y.v)};
}
inline MVValue mv_mul(const MVValue& x, const MVValue& y) {
    const Chain& c = same_chain(x, y);
    return {c, mv_mul(c, x.v, y.v)};
}
inline MVValue mv_comp(const MVValue& x) { return {x.chain, mv_comp(x.chain, x.v)}; }
// Natural order: x ⊑ y iff x ⊖ y = 0.
inline bool mv_leq(const MVValue& x, const MVValue& y) {
    const Chain& c = same_chain(x, y);
    return mv_sub(c, x.v, y.v) == 0;
}

// Interned element ids with dense indices.
class Universe {
public:
    explicit Universe(std::vector<std::string> ids) : ids_(std::move(ids)) {
        for (size_t i = 0; i < ids_.size(); ++i)
            if (!index_.emplace(ids_[i], i).second)
                throw PreconditionError("duplicate element id '" + ids_[i] + "'");
    }
    static std::shared_ptr<const Universe> make(std::vector<std::string> ids) {
        return std::make_shared<const Universe>(std::move(ids));
    }
    size_t size() const { return ids_.size(); }
    const std::string& id(size_t i) const { return ids_.at(i); }
    const std::vector<std::string>& ids() const { return ids_; }
    bool has(const std::string& s) const { return index_.count(s) != 0; }
    size_t at(const std::string& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) throw PreconditionError("unknown element id '" + s + "'");
        return it->second;
    }
    bool operator==(const Universe& o) const { return ids_ == o.ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, size_t> index_;
};
using UniversePtr = std::shared_ptr<const Universe>;

inline bool same_universe(const UniversePtr& a, const UniversePtr& b) {
    return a == b || (a && b && *a == *b);
}

// Row-major universe of ordered pairs "s,t" over a base universe.
inline UniversePtr pair_universe(const Universe& base) {
    std::vector<std::string> ids;
    ids.reserve(base.size() * base.size());
    for (size_t i = 0; i < base.size(); ++i)
        for (size_t j = 0; j < base.size(); ++j) ids.push_back(base.id(i) + "," + base.id(j));
    return Universe::make(std::move(ids));
}

class Subset {
public:
    Subset() = default;
    explicit Subset(UniversePtr u) : u_(std::move(u)), bits_(u_->size()) {}
    static Subset full(UniversePtr u) {
        Subset s(std::move(u));
        s.bits_.set();
        return s;
    }
    static Subset of(UniversePtr u, const std::vector<std::string>& ids) {
        Subset s(u);
        for (const auto& id : ids) s.insert(u->at(id));
        return s;
    }

    const UniversePtr& universe() const { return u_; }
    size_t universe_size() const { return bits_.size(); }
    bool contains(size_t i) const { return bits_.test(i); }
    void insert(size_t i) { bits_.set(i); }
    void erase(size_t i) { bits_.reset(i); }
    size_t count() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }

    std::vector<size_t> elements() const {
        std::vector<size_t> out;
        for (auto i = bits_.find_first(); i != boost::dynamic_bitset<>::npos; i = bits_.find_next(i))
            out.push_back(i);
        return out;
    }
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (size_t i : elements()) out.push_back(u_->id(i));
        return out;
    }

    Subset operator|(const Subset& o) const { return combine(o, bits_ | o.bits_); }
    Subset operator&(const Subset& o) const { return combine(o, bits_ & o.bits_); }
    Subset operator-(const Subset& o) const { return combine(o, bits_ - o.bits_); }
    Subset complement() const {
        Subset s = *this;
        s.bits_.flip();
        return s;
    }
    bool subset_of(const Subset& o) const {
        check(o);
        return bits_.is_subset_of(o.bits_);
    }
    bool operator==(const Subset& o) const { return bits_ == o.bits_; }

    const boost::dynamic_bitset<>& bits() const { return bits_; }

private:
    void check(const Subset& o) const {
        if (bits_.size() != o.bits_.size() || (u_ && o.u_ && !same_universe(u_, o.u_)))
            throw PreconditionError("subsets over different universes");
    }
    Subset combine(const Subset& o, boost::dynamic_bitset<> b) const {
        check(o);
        Subset s = *this;
        s.bits_ = std::move(b);
        return s;
    }

    UniversePtr u_;
    boost::dynamic_bitset<> bits_;
};

class Valuation {
public:
    Valuation() = default;
    Valuation(UniversePtr u, Chain c) : u_(std::move(u)), chain_(c), v_(u_->size()) {}
    Valuation(UniversePtr u, Chain c, std::vector<Rational> values)
        : u_(std::move(u)), chain_(c), v_(std::move(values)) {
        if (v_.size() != u_->size()) throw PreconditionError("valuation size differs from universe");
        for (auto& x : v_) {
            x.canonicalize();
            if (!chain_.contains(x))
                throw PreconditionError(format_rational(x) + " is not in chain " + chain_.name());
        }
    }
    static Valuation constant(UniversePtr u, Chain c, const Rational& x) {
        return Valuation(u, c, std::vector<Rational>(u->size(), x));
    }

    const UniversePtr& universe() const { return u_; }
    const Chain& chain() const { return chain_; }
    size_t size() const { return v_.size(); }
    const Rational& operator[](size_t i) const { return v_[i]; }
    const Rational& at(const std::string& id) const { return v_[u_->at(id)]; }
    MVValue value(size_t i) const { return {chain_, v_[i]}; }
    const std::vector<Rational>& values() const { return v_; }

    void set(size_t i, const Rational& x) {
        if (!chain_.contains(x))
            throw PreconditionError(format_rational(x) + " is not in chain " + chain_.name());
        v_[i] = x;
    }

    bool operator==(const Valuation& o) const { return v_ == o.v_ && chain_ == o.chain_; }
    bool leq(const Valuation& o) const {
        check(o);
        for (size_t i = 0; i < v_.size(); ++i)
            if (v_[i] > o.v_[i]) return false;
        return true;
    }

    Valuation oplus(const Valuation& o) const { return zip(o, [&](auto& x, auto& y) { return mv_add(chain_, x, y); }); }
    Valuation ominus(const Valuation& o) const { return zip(o, [&](auto& x, auto& y) { return mv_sub(chain_, x, y); }); }
    Valuation otimes(const Valuation& o) const { return zip(o, [&](auto& x, auto& y) { return mv_mul(chain_, x, y); }); }
    Valuation comp() const {
        Valuation r = *this;
        for (auto& x : r.v_) x = mv_comp(chain_, x);
        return r;
    }
    // a ⊕ δ_{Y'} and a ⊖ δ_{Y'}
    Valuation oplus_on(const Subset& ys, const Rational& d) const {
        Valuation r = *this;
        for (size_t i : ys.elements()) r.v_[i] = mv_add(chain_, v_[i], d);
        return r;
    }
    Valuation ominus_on(const Subset& ys, const Rational& d) const {
        Valuation r = *this;
        for (size_t i : ys.elements()) r.v_[i] = mv_sub(chain_, v_[i], d);
        return r;
    }
    Valuation restrict(UniversePtr sub, const std::vector<size_t>& idx) const {
        std::vector<Rational> out;
        out.reserve(idx.size());
        for (size_t i : idx) out.push_back(v_.at(i));
        return Valuation(std::move(sub), chain_, std::move(out));
    }

    std::string str() const {
        std::ostringstream os;
        os << "(";
        for (size_t i = 0; i < v_.size(); ++i) os << (i ? ", " : "") << u_->id(i) << ":" << format_rational(v_[i]);
        os << ")";
        return os.str();
    }

private:
    void check(const Valuation& o) const {
        if (!(chain_ == o.chain_)) throw VariantMismatch("chain " + chain_.name() + " vs " + o.chain_.name());
        if (!same_universe(u_, o.u_)) throw PreconditionError("valuations over different universes");
    }
    template <class F>
    Valuation zip(const Valuation& o, F f) const {
        check(o);
        Valuation r = *this;
        for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = f(v_[i], o.v_[i]);
        return r;
    }

    UniversePtr u_;
    Chain chain_;
    std::vector<Rational> v_;
};

// ‖a‖ = max entry; 0 for the empty universe.
inline Rational norm(const Valuation& a) {
    Rational m = 0;
    for (const auto& x : a.values()) m = std::max(m, x);
    return m;
}

// [Y]^a = {y | a(y) != 1}
inline Subset support_floor(const Valuation& a) {
    Subset s(a.universe());
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != a.chain().top()) s.insert(i);
    return s;
}
// [Y]_a = {y | a(y) != 0}
inline Subset support_ceil(const Valuation& a) {
    Subset s(a.universe());
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) s.insert(i);
    return s;
}

// min of comp(a(y)) over ys ∩ [Y]^a; top when that is empty.
inline Rational delta_floor_on(const Valuation& a, const Subset& ys) {
    Rational m = a.chain().top();
    for (size_t i : ys.elements())
        if (a[i] != a.chain().top()) m = std::min(m, mv_comp(a.chain(), a[i]));
    return m;
}
inline Rational delta_ceil_on(const Valuation& a, const Subset& ys) {
    Rational m = a.chain().top();
    for (size_t i : ys.elements())
        if (a[i] != 0) m = std::min(m, a[i]);
    return m;
}
inline Rational delta_floor(const Valuation& a) { return delta_floor_on(a, Subset::full(a.universe())); }
inline Rational delta_ceil(const Valuation& a) { return delta_ceil_on(a, Subset::full(a.universe())); }

}  // namespace mvfix
