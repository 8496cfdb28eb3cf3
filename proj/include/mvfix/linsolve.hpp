#pragma once
// Exact Gaussian elimination and graph helpers shared by the models.
#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mvfix/rational.hpp"

namespace mvfix {

// Solves A x = b; throws if A is singular.
inline std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) throw std::runtime_error("solve_linear: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        Rational inv = 1 / a[col][col];
        for (size_t k = col; k < n; ++k) a[col][k] *= inv;
        b[col] *= inv;
        for (size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (size_t k = col; k < n; ++k) a[i][k] -= f * a[col][k];
            b[i] -= f * b[col];
        }
    }
    return b;
}

// Nodes from which some node in `targets` is reachable along `succ`.
inline std::vector<char> can_reach(const std::vector<std::vector<size_t>>& succ, const std::vector<char>& targets) {
    const size_t n = succ.size();
    std::vector<std::vector<size_t>> pred(n);
    for (size_t v = 0; v < n; ++v)
        for (size_t w : succ[v]) pred[w].push_back(v);
    std::vector<char> seen = targets;
    std::vector<size_t> stack;
    for (size_t v = 0; v < n; ++v)
        if (seen[v]) stack.push_back(v);
    while (!stack.empty()) {
        size_t v = stack.back();
        stack.pop_back();
        for (size_t u : pred[v])
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
    }
    return seen;
}

// Strongly connected components (Tarjan); returns component id per node.
inline std::vector<size_t> scc(const std::vector<std::vector<size_t>>& succ, size_t& count) {
    const size_t n = succ.size();
    std::vector<long> idx(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<size_t> st, comp(n, 0);
    long counter = 0;
    count = 0;
    std::function<void(size_t)> visit = [&](size_t v) {
        idx[v] = low[v] = counter++;
        st.push_back(v);
        on[v] = 1;
        for (size_t w : succ[v]) {
            if (idx[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], idx[w]);
            }
        }
        if (low[v] == idx[v]) {
            for (;;) {
                size_t w = st.back();
                st.pop_back();
                on[w] = 0;
                comp[w] = count;
                if (w == v) break;
            }
            ++count;
        }
    };
    for (size_t v = 0; v < n; ++v)
        if (idx[v] < 0) visit(v);
    return comp;
}

}  // namespace mvfix
