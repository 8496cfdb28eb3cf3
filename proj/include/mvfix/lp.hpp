#pragma once
// Exact dense two-phase simplex (Bland's rule) and a transportation front end.
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvfix/rational.hpp"

namespace mvfix {

enum class Sense { Min, Max };
enum class Rel { Le, Ge, Eq };

struct LpRow {
    std::vector<Rational> a;
    Rel rel = Rel::Eq;
    Rational b;
    std::string name;
};

// Variables are non-negative; an optional finite upper bound per variable.
struct LinearProgram {
    Sense sense = Sense::Min;
    std::vector<Rational> c;
    std::vector<std::optional<Rational>> upper;
    std::vector<std::string> var_names;
    std::vector<LpRow> rows;

    size_t num_vars() const { return c.size(); }

    size_t add_var(std::string name, Rational cost = 0, std::optional<Rational> ub = std::nullopt) {
        c.push_back(std::move(cost));
        upper.push_back(std::move(ub));
        var_names.push_back(std::move(name));
        for (auto& r : rows) r.a.resize(c.size());
        return c.size() - 1;
    }
    void add_row(std::vector<std::pair<size_t, Rational>> terms, Rel rel, Rational b, std::string name = {}) {
        LpRow r;
        r.a.assign(c.size(), Rational(0));
        for (auto& [j, v] : terms) r.a.at(j) += v;
        r.rel = rel;
        r.b = std::move(b);
        r.name = name.empty() ? "c" + std::to_string(rows.size()) : std::move(name);
        rows.push_back(std::move(r));
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* lp_status_name(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> x;
    Rational value;
    long pivots = 0;
};

// Plain-text dump, one constraint per line.
inline std::string dump_lp(const LinearProgram& lp) {
    std::ostringstream os;
    auto name = [&](size_t j) { return lp.var_names.size() > j && !lp.var_names[j].empty() ? lp.var_names[j] : "x" + std::to_string(j); };
    auto terms = [&](const std::vector<Rational>& a) {
        bool first = true;
        for (size_t j = 0; j < a.size(); ++j) {
            if (a[j] == 0) continue;
            Rational v = a[j];
            if (!first) os << (v < 0 ? " - " : " + ");
            else if (v < 0) os << "-";
            if (v < 0) v = -v;
            if (v != 1) os << format_rational(v) << " ";
            os << name(j);
            first = false;
        }
        if (first) os << "0";
    };
    os << (lp.sense == Sense::Min ? "min: " : "max: ");
    terms(lp.c);
    os << ";\n";
    for (auto& r : lp.rows) {
        os << r.name << ": ";
        terms(r.a);
        os << (r.rel == Rel::Le ? " <= " : r.rel == Rel::Ge ? " >= " : " = ") << format_rational(r.b) << ";\n";
    }
    for (size_t j = 0; j < lp.num_vars(); ++j)
        if (lp.upper[j]) os << "0 <= " << name(j) << " <= " << format_rational(*lp.upper[j]) << ";\n";
    return os.str();
}

namespace detail {

class Tableau {
public:
    std::vector<std::vector<Rational>> t;  // rows, last column is the rhs
    std::vector<Rational> obj;             // reduced costs, last entry = -objective
    std::vector<size_t> basis;
    long pivots = 0;

    size_t cols() const { return obj.size() - 1; }

    void pivot(size_t r, size_t j) {
        ++pivots;
        Rational inv = 1 / t[r][j];
        std::vector<size_t> nz;
        for (size_t k = 0; k < t[r].size(); ++k)
            if (t[r][k] != 0) {
                t[r][k] *= inv;
                nz.push_back(k);
            }
        auto eliminate = [&](std::vector<Rational>& row) {
            if (row[j] == 0) return;
            Rational f = row[j];
            for (size_t k : nz) row[k] -= f * t[r][k];
        };
        for (size_t i = 0; i < t.size(); ++i)
            if (i != r) eliminate(t[i]);
        eliminate(obj);
        basis[r] = j;
    }

    // Minimizes obj over columns not in `blocked`. Returns false when unbounded.
    bool run(const std::vector<char>& blocked) {
        const size_t rhs = cols();
        for (;;) {
            size_t enter = rhs;
            for (size_t j = 0; j < rhs; ++j)
                if (!blocked[j] && obj[j] < 0) {
                    enter = j;
                    break;
                }
            if (enter == rhs) return true;
            size_t leave = t.size();
            Rational best;
            for (size_t i = 0; i < t.size(); ++i) {
                if (t[i][enter] <= 0) continue;
                Rational ratio = t[i][rhs] / t[i][enter];
                if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == t.size()) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp) {
    const size_t n = lp.num_vars();
    std::vector<LpRow> rows = lp.rows;
    for (size_t j = 0; j < n; ++j)
        if (lp.upper[j]) {
            LpRow r;
            r.a.assign(n, Rational(0));
            r.a[j] = 1;
            r.rel = Rel::Le;
            r.b = *lp.upper[j];
            rows.push_back(std::move(r));
        }
    for (auto& r : rows) {
        if (r.a.size() != n) throw std::invalid_argument("LP row width differs from variable count");
        if (r.b < 0) {
            for (auto& v : r.a) v = -v;
            r.b = -r.b;
            if (r.rel != Rel::Eq) r.rel = r.rel == Rel::Le ? Rel::Ge : Rel::Le;
        }
    }

    const size_t m = rows.size();
    size_t n_slack = 0, n_art = 0;
    for (auto& r : rows) {
        if (r.rel != Rel::Eq) ++n_slack;
        if (r.rel != Rel::Le) ++n_art;
    }
    const size_t total = n + n_slack + n_art;

    detail::Tableau tab;
    tab.t.assign(m, std::vector<Rational>(total + 1));
    tab.basis.assign(m, 0);
    tab.obj.assign(total + 1, Rational(0));
    std::vector<char> is_art(total, 0);

    size_t s = n, art = n + n_slack;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) tab.t[i][j] = rows[i].a[j];
        tab.t[i][total] = rows[i].b;
        if (rows[i].rel == Rel::Le) {
            tab.t[i][s] = 1;
            tab.basis[i] = s++;
        } else {
            if (rows[i].rel == Rel::Ge) tab.t[i][s++] = -1;
            tab.t[i][art] = 1;
            is_art[art] = 1;
            tab.basis[i] = art++;
        }
    }

    LpResult res;
    // phase 1: minimise the sum of artificials
    for (size_t i = 0; i < m; ++i)
        if (is_art[tab.basis[i]])
            for (size_t j = 0; j <= total; ++j)
                if (j == total || !is_art[j]) tab.obj[j] -= tab.t[i][j];
    std::vector<char> none(total, 0);
    tab.run(none);
    if (tab.obj[total] != 0) {
        res.status = LpStatus::Infeasible;
        res.pivots = tab.pivots;
        return res;
    }
    // drive remaining (zero-level) artificials out of the basis, dropping redundant rows
    for (size_t i = 0; i < tab.t.size();) {
        if (!is_art[tab.basis[i]]) {
            ++i;
            continue;
        }
        size_t j = 0;
        while (j < total && (is_art[j] || tab.t[i][j] == 0)) ++j;
        if (j < total) {
            tab.pivot(i, j);
            ++i;
        } else {
            tab.t.erase(tab.t.begin() + static_cast<long>(i));
            tab.basis.erase(tab.basis.begin() + static_cast<long>(i));
        }
    }

    // phase 2
    std::fill(tab.obj.begin(), tab.obj.end(), Rational(0));
    for (size_t j = 0; j < n; ++j) tab.obj[j] = lp.sense == Sense::Min ? lp.c[j] : Rational(-lp.c[j]);
    for (size_t i = 0; i < tab.t.size(); ++i) {
        Rational cb = tab.obj[tab.basis[i]];
        if (cb == 0) continue;
        for (size_t j = 0; j <= total; ++j) tab.obj[j] -= cb * tab.t[i][j];
    }
    bool bounded = tab.run(is_art);
    res.pivots = tab.pivots;
    if (!bounded) {
        res.status = LpStatus::Unbounded;
        return res;
    }
    res.status = LpStatus::Optimal;
    res.x.assign(n, Rational(0));
    for (size_t i = 0; i < tab.t.size(); ++i)
        if (tab.basis[i] < n) res.x[tab.basis[i]] = tab.t[i][total];
    res.value = 0;
    for (size_t j = 0; j < n; ++j) res.value += lp.c[j] * res.x[j];
    return res;
}

using Matrix = std::vector<std::vector<Rational>>;
using Mask = std::vector<std::vector<bool>>;

struct TransportInstance {
    std::vector<Rational> p, q;
    Matrix cost;              // |p| x |q|
    std::optional<Mask> mask;  // allowed cells
};

struct TransportResult {
    LpStatus status = LpStatus::Infeasible;
    Rational value;
    Matrix coupling;
};

inline void validate_transport(const TransportInstance& t) {
    Rational sp = 0, sq = 0;
    for (auto& x : t.p) {
        if (x < 0) throw std::invalid_argument("transport: negative mass");
        sp += x;
    }
    for (auto& x : t.q) {
        if (x < 0) throw std::invalid_argument("transport: negative mass");
        sq += x;
    }
    if (sp != 1 || sq != 1) throw std::invalid_argument("transport: marginals must sum to 1");
    if (t.cost.size() != t.p.size()) throw std::invalid_argument("transport: cost rows != |p|");
    for (auto& r : t.cost)
        if (r.size() != t.q.size()) throw std::invalid_argument("transport: cost columns != |q|");
    if (t.mask) {
        if (t.mask->size() != t.p.size()) throw std::invalid_argument("transport: mask rows != |p|");
        for (auto& r : *t.mask)
            if (r.size() != t.q.size()) throw std::invalid_argument("transport: mask columns != |q|");
    }
}

// Optimal coupling in Ω(p,q) (restricted to mask cells if given). `sense` = Max gives the largest cost.
inline TransportResult solve_transport(const TransportInstance& t, Sense sense = Sense::Min) {
    validate_transport(t);
    const size_t m = t.p.size(), n = t.q.size();
    LinearProgram lp;
    lp.sense = sense;
    std::vector<std::vector<long>> var(m, std::vector<long>(n, -1));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            if (!t.mask || (*t.mask)[i][j])
                var[i][j] = static_cast<long>(lp.add_var("c" + std::to_string(i) + "_" + std::to_string(j), t.cost[i][j]));
    for (size_t i = 0; i < m; ++i) {
        std::vector<std::pair<size_t, Rational>> terms;
        for (size_t j = 0; j < n; ++j)
            if (var[i][j] >= 0) terms.emplace_back(static_cast<size_t>(var[i][j]), 1);
        lp.add_row(std::move(terms), Rel::Eq, t.p[i], "row" + std::to_string(i));
    }
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::pair<size_t, Rational>> terms;
        for (size_t i = 0; i < m; ++i)
            if (var[i][j] >= 0) terms.emplace_back(static_cast<size_t>(var[i][j]), 1);
        lp.add_row(std::move(terms), Rel::Eq, t.q[j], "col" + std::to_string(j));
    }
    LpResult r = solve_lp(lp);
    TransportResult out;
    out.status = r.status;
    if (r.status != LpStatus::Optimal) return out;
    out.value = r.value;
    out.coupling.assign(m, std::vector<Rational>(n, Rational(0)));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            if (var[i][j] >= 0) out.coupling[i][j] = r.x[static_cast<size_t>(var[i][j])];
    return out;
}

// All vertices of Ω(p,q) for strictly positive p, q: basic solutions over (|p|+|q|-1)-cell bases.
inline std::vector<Matrix> transport_vertices(const std::vector<Rational>& p, const std::vector<Rational>& q,
                                              double max_bases = 5e6) {
    const size_t m = p.size(), n = q.size();
    for (auto& x : p)
        if (x <= 0) throw std::invalid_argument("transport_vertices: p must be strictly positive");
    for (auto& x : q)
        if (x <= 0) throw std::invalid_argument("transport_vertices: q must be strictly positive");
    const size_t cells = m * n, r = m + n - 1;
    double combos = 1;
    for (size_t i = 0; i < r; ++i) combos = combos * static_cast<double>(cells - i) / static_cast<double>(i + 1);
    if (combos > max_bases) throw std::runtime_error("transport_vertices: too many candidate bases");

    std::set<std::vector<Rational>> seen;
    std::vector<Matrix> out;
    std::vector<size_t> pick(r);
    for (size_t i = 0; i < r; ++i) pick[i] = i;
    for (;;) {
        // equations: rows i (sum over picked cells in row i = p_i), columns j
        Matrix a(m + n, std::vector<Rational>(r + 1));
        for (size_t k = 0; k < r; ++k) {
            a[pick[k] / n][k] = 1;
            a[m + pick[k] % n][k] = 1;
        }
        for (size_t i = 0; i < m; ++i) a[i][r] = p[i];
        for (size_t j = 0; j < n; ++j) a[m + j][r] = q[j];
        size_t row = 0;
        bool ok = true;
        for (size_t col = 0; col < r && ok; ++col) {
            size_t piv = row;
            while (piv < a.size() && a[piv][col] == 0) ++piv;
            if (piv == a.size()) {
                ok = false;  // singular basis
                break;
            }
            std::swap(a[piv], a[row]);
            Rational inv = 1 / a[row][col];
            for (auto& v : a[row]) v *= inv;
            for (size_t i = 0; i < a.size(); ++i)
                if (i != row && a[i][col] != 0) {
                    Rational f = a[i][col];
                    for (size_t k = col; k <= r; ++k) a[i][k] -= f * a[row][k];
                }
            ++row;
        }
        if (ok) {
            for (size_t i = row; i < a.size(); ++i)
                if (a[i][r] != 0) ok = false;
            std::vector<Rational> flat(cells, Rational(0));
            for (size_t k = 0; k < r && ok; ++k) {
                if (a[k][r] < 0) ok = false;
                flat[pick[k]] = a[k][r];
            }
            if (ok && seen.insert(flat).second) {
                Matrix c(m, std::vector<Rational>(n));
                for (size_t k = 0; k < cells; ++k) c[k / n][k % n] = flat[k];
                out.push_back(std::move(c));
            }
        }
        // next combination
        size_t i = r;
        while (i > 0 && pick[i - 1] == cells - r + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (size_t k = i; k < r; ++k) pick[k] = pick[k - 1] + 1;
    }
    return out;
}

}  // namespace mvfix
