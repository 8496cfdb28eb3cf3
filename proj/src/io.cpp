#include "mvfix/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mvfix::io {

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SchemaError((path.empty() ? std::string("/") : path) + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(join(path, key), "missing field");
    return *it;
}

const json& typed(const json& j, json::value_t t, const std::string& path, const char* what) {
    bool ok = t == json::value_t::object ? j.is_object() : t == json::value_t::array ? j.is_array() : j.is_string();
    if (!ok) fail(path, std::string("expected ") + what);
    return j;
}
const json& obj(const json& j, const std::string& key, const std::string& path) {
    return typed(field(j, key, path), json::value_t::object, join(path, key), "an object");
}
const json& arr(const json& j, const std::string& key, const std::string& path) {
    return typed(field(j, key, path), json::value_t::array, join(path, key), "an array");
}

std::string str(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Rational rat(const json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer() || j.is_number_unsigned()) return parse_rational(j.dump());
        if (j.is_number_float()) return parse_rational(j.dump());
    } catch (const ParseError& e) {
        fail(path, e.what());
    }
    fail(path, "expected a rational (\"p/q\", decimal string or number)");
}

std::vector<std::string> str_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], join(path, std::to_string(i))));
    return out;
}

std::map<std::string, Rational> rat_map(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object of rationals");
    std::map<std::string, Rational> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rat(it.value(), join(path, it.key()));
    return out;
}

std::map<std::string, std::vector<std::string>> succ_map(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object of successor lists");
    std::map<std::string, std::vector<std::string>> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = str_list(it.value(), join(path, it.key()));
    return out;
}

void check_version(const json& j) {
    if (j.is_object() && j.contains("version") && j["version"] != "v1") fail("/version", "unsupported schema version");
}

// Wraps model constructors so their precondition messages carry a path.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const PreconditionError& e) {
        fail(path, e.what());
    } catch (const std::out_of_range& e) {
        fail(path, e.what());
    }
}

json rat_json(const Rational& r) { return format_rational(r); }

Chain parse_chain(const json& j, const std::string& path) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "unit") return Chain::unit();
        if (s == "bool") return Chain::boolean();
        fail(path, "unknown chain '" + s + "'");
    }
    if (j.is_object() && j.contains("bounded")) {
        const auto& k = j["bounded"];
        if (!k.is_number_integer() || k.get<long>() < 1) fail(join(path, "bounded"), "expected a positive integer");
        return Chain::bounded(k.get<long>());
    }
    fail(path, "expected \"unit\", \"bool\" or {\"bounded\": k}");
}

}  // namespace

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::MarkovChain: return "mc";
        case ModelKind::Mts: return "mts";
        case ModelKind::Lts: return "lts";
        case ModelKind::Pa: return "pa";
        case ModelKind::Ssg: return "ssg";
        case ModelKind::FnExpr: return "fnexpr";
    }
    return "?";
}

ModelKind detect_kind(const json& j) {
    if (!j.is_object()) fail("", "expected a model object");
    check_version(j);
    if (j.contains("kind")) {
        auto k = str(j["kind"], "/kind");
        for (auto m : {ModelKind::MarkovChain, ModelKind::Mts, ModelKind::Lts, ModelKind::Pa, ModelKind::Ssg, ModelKind::FnExpr})
            if (k == model_kind_name(m)) return m;
        fail("/kind", "unknown model kind '" + k + "'");
    }
    if (j.contains("nodes") && j.contains("root")) return ModelKind::FnExpr;
    if (j.contains("nodes")) return ModelKind::Ssg;
    if (j.contains("terminal") || j.contains("dist")) return ModelKind::MarkovChain;
    if (j.contains("weights")) return ModelKind::Mts;
    if (j.contains("ell") || j.contains("dists")) return ModelKind::Pa;
    if (j.contains("succ")) return ModelKind::Lts;
    fail("", "cannot tell which model this is; add a \"kind\" field");
}

MarkovChain parse_mc(const json& j) {
    check_version(j);
    auto states = str_list(arr(j, "states", ""), "/states");
    std::vector<std::string> terminal;
    if (j.contains("terminal")) terminal = str_list(j["terminal"], "/terminal");
    std::map<std::string, std::map<std::string, Rational>> dist;
    if (j.contains("dist")) {
        const auto& d = obj(j, "dist", "");
        for (auto it = d.begin(); it != d.end(); ++it) dist[it.key()] = rat_map(it.value(), "/dist/" + it.key());
    }
    return guarded("/", [&] { return make_markov_chain(states, terminal, dist); });
}

MetricTS parse_mts(const json& j) {
    check_version(j);
    auto states = str_list(arr(j, "states", ""), "/states");
    auto weights = rat_map(obj(j, "weights", ""), "/weights");
    std::map<std::string, std::vector<std::string>> succ;
    if (j.contains("succ")) succ = succ_map(j["succ"], "/succ");
    return guarded("/", [&] { return make_mts(states, weights, succ); });
}

TransitionSystem parse_lts(const json& j) {
    check_version(j);
    auto states = str_list(arr(j, "states", ""), "/states");
    std::map<std::string, std::vector<std::string>> succ;
    if (j.contains("succ")) succ = succ_map(j["succ"], "/succ");
    return guarded("/", [&] { return make_ts(states, succ); });
}

ProbAutomaton parse_pa(const json& j) {
    check_version(j);
    auto states = str_list(arr(j, "states", ""), "/states");
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = str_list(j["labels"], "/labels");
    std::map<std::string, std::string> ell;
    const auto& e = obj(j, "ell", "");
    for (auto it = e.begin(); it != e.end(); ++it) {
        ell[it.key()] = str(it.value(), "/ell/" + it.key());
        if (!labels.empty() && std::find(labels.begin(), labels.end(), ell[it.key()]) == labels.end())
            fail("/ell/" + it.key(), "label '" + ell[it.key()] + "' is not listed in /labels");
    }
    std::map<std::string, std::vector<std::map<std::string, Rational>>> dists;
    if (j.contains("dists")) {
        const auto& d = obj(j, "dists", "");
        for (auto it = d.begin(); it != d.end(); ++it) {
            std::string p = "/dists/" + it.key();
            if (!it.value().is_array()) fail(p, "expected an array of distributions");
            for (size_t i = 0; i < it.value().size(); ++i)
                dists[it.key()].push_back(rat_map(it.value()[i], join(p, std::to_string(i))));
        }
    }
    return guarded("/", [&] { return make_pa(states, ell, dists); });
}

Ssg parse_ssg(const json& j) {
    check_version(j);
    const auto& nodes = arr(j, "nodes", "");
    std::vector<SsgNode> spec;
    for (size_t i = 0; i < nodes.size(); ++i) {
        std::string p = "/nodes/" + std::to_string(i);
        const auto& n = nodes[i];
        SsgNode s;
        s.id = str(field(n, "id", p), p + "/id");
        auto kind = str(field(n, "kind", p), p + "/kind");
        if (kind == "min" || kind == "max") {
            s.kind = kind == "min" ? NodeKind::Min : NodeKind::Max;
            s.succ = str_list(field(n, "succ", p), p + "/succ");
        } else if (kind == "av") {
            s.kind = NodeKind::Av;
            s.dist = rat_map(field(n, "dist", p), p + "/dist");
        } else if (kind == "sink") {
            s.kind = NodeKind::Sink;
            s.weight = rat(field(n, "weight", p), p + "/weight");
        } else {
            fail(p + "/kind", "expected min, max, av or sink");
        }
        spec.push_back(std::move(s));
    }
    return guarded("/nodes", [&] { return make_ssg(spec); });
}

// {"chain", "universes": {name: [ids]}, "nodes": [{id, op, ...}], "root"}
FnPtr parse_fnexpr(const json& j) {
    check_version(j);
    Chain chain = j.contains("chain") ? parse_chain(j["chain"], "/chain") : Chain::unit();
    std::map<std::string, UniversePtr> unis;
    const auto& us = obj(j, "universes", "");
    for (auto it = us.begin(); it != us.end(); ++it)
        unis[it.key()] = guarded("/universes/" + it.key(), [&] { return Universe::make(str_list(it.value(), "/universes/" + it.key())); });
    auto uni = [&](const json& n, const char* key, const std::string& p) {
        auto name = str(field(n, key, p), join(p, key));
        auto f = unis.find(name);
        if (f == unis.end()) fail(join(p, key), "unknown universe '" + name + "'");
        return f->second;
    };
    auto index_of = [&](const UniversePtr& u, const std::string& id, const std::string& p) {
        return guarded(p, [&] { return u->at(id); });
    };

    std::map<std::string, FnPtr> built;
    const auto& nodes = arr(j, "nodes", "");
    for (size_t i = 0; i < nodes.size(); ++i) {
        std::string p = "/nodes/" + std::to_string(i);
        const auto& n = nodes[i];
        auto id = str(field(n, "id", p), p + "/id");
        auto op = str(field(n, "op", p), p + "/op");
        auto child = [&](const char* key) {
            auto name = str(field(n, key, p), join(p, key));
            auto f = built.find(name);
            if (f == built.end()) fail(join(p, key), "unknown or later node '" + name + "'");
            return f->second;
        };
        FnPtr f = guarded(p, [&]() -> FnPtr {
            if (op == "constant") {
                auto dom = uni(n, "dom", p), cod = uni(n, "cod", p);
                auto vals = rat_map(field(n, "values", p), p + "/values");
                std::vector<Rational> v(cod->size(), Rational(0));
                for (auto& [k, x] : vals) v[index_of(cod, k, p + "/values")] = x;
                return fn::constant(dom, Valuation(cod, chain, v));
            }
            if (op == "reindex") {
                auto dom = uni(n, "dom", p), cod = uni(n, "cod", p);
                const auto& m = field(n, "map", p);
                std::vector<size_t> u(cod->size(), dom->size());
                for (auto it = m.begin(); it != m.end(); ++it)
                    u[index_of(cod, it.key(), p + "/map")] = index_of(dom, str(it.value(), p + "/map/" + it.key()), p + "/map/" + it.key());
                for (size_t z = 0; z < u.size(); ++z)
                    if (u[z] == dom->size()) fail(p + "/map", "no image for '" + cod->id(z) + "'");
                return fn::reindex(dom, cod, chain, u);
            }
            if (op == "min" || op == "max") {
                auto dom = uni(n, "dom", p), cod = uni(n, "cod", p);
                const auto& r = field(n, "rel", p);
                std::vector<std::vector<size_t>> rel(cod->size());
                for (auto it = r.begin(); it != r.end(); ++it)
                    for (auto& y : str_list(it.value(), p + "/rel/" + it.key()))
                        rel[index_of(cod, it.key(), p + "/rel")].push_back(index_of(dom, y, p + "/rel/" + it.key()));
                return op == "min" ? fn::min_rel(dom, cod, chain, rel) : fn::max_rel(dom, cod, chain, rel);
            }
            if (op == "average") {
                auto dom = uni(n, "dom", p), cod = uni(n, "cod", p);
                const auto& d = field(n, "dists", p);
                std::vector<Distribution> ds(cod->size());
                std::vector<char> seen(cod->size(), 0);
                for (auto it = d.begin(); it != d.end(); ++it) {
                    std::vector<std::pair<size_t, Rational>> w;
                    for (auto& [y, x] : rat_map(it.value(), p + "/dists/" + it.key())) w.emplace_back(index_of(dom, y, p + "/dists/" + it.key()), x);
                    size_t z = index_of(cod, it.key(), p + "/dists");
                    ds[z] = make_distribution(std::move(w));
                    seen[z] = 1;
                }
                for (size_t z = 0; z < seen.size(); ++z)
                    if (!seen[z]) fail(p + "/dists", "no distribution for '" + cod->id(z) + "'");
                return fn::average(dom, cod, chain, ds);
            }
            if (op == "translate") {
                auto dir = str(field(n, "dir", p), p + "/dir");
                if (dir != "up" && dir != "down") fail(p + "/dir", "expected up or down");
                return fn::translate(uni(n, "dom", p), chain, rat(field(n, "c", p), p + "/c"), dir == "up");
            }
            if (op == "compose") return fn::compose(child("outer"), child("inner"));
            if (op == "union") {
                auto dom = uni(n, "dom", p), cod = uni(n, "cod", p);
                const auto& ps = field(n, "parts", p);
                if (!ps.is_array()) fail(p + "/parts", "expected an array");
                std::vector<UnionPart> parts;
                for (size_t k = 0; k < ps.size(); ++k) {
                    std::string pp = p + "/parts/" + std::to_string(k);
                    auto name = str(field(ps[k], "f", pp), pp + "/f");
                    auto fit = built.find(name);
                    if (fit == built.end()) fail(pp + "/f", "unknown or later node '" + name + "'");
                    UnionPart part{fit->second, {}, {}};
                    auto embed = [&](const char* key, const UniversePtr& inner, const UniversePtr& outer) {
                        std::vector<size_t> m(inner->size(), outer->size());
                        const auto& mj = field(ps[k], key, pp);
                        for (auto it = mj.begin(); it != mj.end(); ++it)
                            m[index_of(inner, it.key(), join(pp, key))] = index_of(outer, str(it.value(), join(pp, key)), join(pp, key));
                        for (size_t y = 0; y < m.size(); ++y)
                            if (m[y] == outer->size()) fail(join(pp, key), "no image for '" + inner->id(y) + "'");
                        return m;
                    };
                    part.dom_map = embed("dom_map", part.f->dom, dom);
                    part.cod_map = embed("cod_map", part.f->cod, cod);
                    parts.push_back(std::move(part));
                }
                return fn::disjoint_union(dom, cod, std::move(parts));
            }
            fail(p + "/op", "unknown operator '" + op + "'");
        });
        if (!built.emplace(id, f).second) fail(p + "/id", "duplicate node id '" + id + "'");
    }
    auto root = str(field(j, "root", ""), "/root");
    auto it = built.find(root);
    if (it == built.end()) fail("/root", "unknown node '" + root + "'");
    return it->second;
}

json to_json(const MarkovChain& mc) {
    json j{{"kind", "mc"}, {"version", "v1"}, {"states", mc.states->ids()}, {"terminal", json::array()}, {"dist", json::object()}};
    for (size_t s = 0; s < mc.states->size(); ++s) {
        if (mc.terminal[s]) j["terminal"].push_back(mc.states->id(s));
        else
            for (auto& [t, p] : mc.eta[s].w) j["dist"][mc.states->id(s)][mc.states->id(t)] = rat_json(p);
    }
    return j;
}

json to_json(const MetricTS& m) {
    json j{{"kind", "mts"}, {"version", "v1"}, {"states", m.states->ids()}, {"weights", json::object()}, {"succ", json::object()}};
    for (size_t s = 0; s < m.states->size(); ++s) {
        j["weights"][m.states->id(s)] = rat_json(m.w[s]);
        auto& out = j["succ"][m.states->id(s)] = json::array();
        for (size_t t : m.succ[s]) out.push_back(m.states->id(t));
    }
    return j;
}

json to_json(const TransitionSystem& ts) {
    json j{{"kind", "lts"}, {"version", "v1"}, {"states", ts.states->ids()}, {"succ", json::object()}};
    for (size_t s = 0; s < ts.states->size(); ++s) {
        auto& out = j["succ"][ts.states->id(s)] = json::array();
        for (size_t t : ts.succ[s]) out.push_back(ts.states->id(t));
    }
    return j;
}

json to_json(const ProbAutomaton& pa) {
    json j{{"kind", "pa"}, {"version", "v1"}, {"states", pa.states->ids()}, {"ell", json::object()}, {"dists", json::object()}};
    std::vector<std::string> labels;
    for (size_t s = 0; s < pa.n(); ++s) {
        j["ell"][pa.states->id(s)] = pa.label[s];
        if (std::find(labels.begin(), labels.end(), pa.label[s]) == labels.end()) labels.push_back(pa.label[s]);
        auto& out = j["dists"][pa.states->id(s)] = json::array();
        for (size_t k : pa.eta[s]) {
            json d = json::object();
            for (auto& [t, p] : pa.D[k].w) d[pa.states->id(t)] = rat_json(p);
            out.push_back(d);
        }
    }
    j["labels"] = labels;
    return j;
}

json to_json(const Ssg& g) {
    json nodes = json::array();
    for (size_t v = 0; v < g.size(); ++v) {
        json n{{"id", g.nodes->id(v)}, {"kind", node_kind_name(g.kind[v])}};
        switch (g.kind[v]) {
            case NodeKind::Min:
            case NodeKind::Max:
                n["succ"] = json::array();
                for (size_t t : g.succ[v]) n["succ"].push_back(g.nodes->id(t));
                break;
            case NodeKind::Av:
                n["dist"] = json::object();
                for (auto& [t, p] : g.dist[v].w) n["dist"][g.nodes->id(t)] = rat_json(p);
                break;
            case NodeKind::Sink: n["weight"] = rat_json(g.w[v]); break;
        }
        nodes.push_back(std::move(n));
    }
    return json{{"kind", "ssg"}, {"version", "v1"}, {"nodes", nodes}};
}

std::unique_ptr<FixpointFunction> load_function(const json& j) {
    switch (detect_kind(j)) {
        case ModelKind::MarkovChain: return std::make_unique<ExprFunction>(term_fn(parse_mc(j)));
        case ModelKind::Mts: return std::make_unique<MtsFunction>(parse_mts(j));
        case ModelKind::Lts: return std::make_unique<BisimFunction>(parse_lts(j));
        case ModelKind::Pa: return std::make_unique<PaFunction>(parse_pa(j));
        case ModelKind::Ssg: return std::make_unique<SsgFunction>(parse_ssg(j));
        case ModelKind::FnExpr: {
            auto f = parse_fnexpr(j);
            return guarded("/root", [&] { return std::make_unique<ExprFunction>(f); });
        }
    }
    throw std::logic_error("unreachable");
}

Valuation parse_valuation(const json& j, const UniversePtr& u, const Chain& chain, const std::optional<Rational>& fallback) {
    check_version(j);
    std::optional<Rational> dflt = fallback;
    if (!dflt && j.is_object() && j.contains("default")) dflt = rat(j["default"], "/default");
    const char* key = j.is_object() && j.contains("pairs") ? "pairs" : "values";
    const auto& m = obj(j, key, "");
    std::vector<std::optional<Rational>> v(u->size());
    for (auto it = m.begin(); it != m.end(); ++it) {
        std::string p = std::string("/") + key + "/" + it.key();
        size_t i = guarded(p, [&] { return u->at(it.key()); });
        Rational x = rat(it.value(), p);
        if (!chain.contains(x)) fail(p, format_rational(x) + " is not in chain " + chain.name());
        v[i] = x;
    }
    std::vector<Rational> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i]) out.push_back(*v[i]);
        else if (dflt && chain.contains(*dflt)) out.push_back(*dflt);
        else if (dflt) fail("/default", format_rational(*dflt) + " is not in chain " + chain.name());
        else fail(std::string("/") + key, "no value for '" + u->id(i) + "' and no default given");
    }
    return Valuation(u, chain, std::move(out));
}

json valuation_to_json(const Valuation& a) {
    json values = json::object();
    for (size_t i = 0; i < a.size(); ++i) values[a.universe()->id(i)] = rat_json(a[i]);
    return values;
}

json certificate_to_json(const Certificate& c) {
    json j{{"verdict", verdict_name(c.verdict)}, {"witness", c.witness.universe() ? c.witness.names() : std::vector<std::string>{}}};
    if (c.theta) j["theta"] = rat_json(*c.theta);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

json strategy_to_json(const Ssg& g, const Strategy& s) {
    json j = json::object();
    for (size_t v = 0; v < g.size(); ++v)
        if (g.kind[v] == s.owner) j[g.nodes->id(v)] = g.nodes->id(s.choice[v]);
    return j;
}

json solution_to_json(const Ssg& g, const GameSolution& s, const std::string& method) {
    return json{{"method", method},
                {"values", valuation_to_json(s.values)},
                {"strategy", {{"owner", node_kind_name(s.strategy.owner)}, {"choice", strategy_to_json(g, s.strategy)}}},
                {"stats", {{"iterations", s.stats.iterations}, {"jumps", s.stats.jumps}, {"lp_calls", s.stats.lp_calls}}}};
}

void validate_result(const json& j) {
    json r = json::parse(j.dump());
    if (!r.is_object()) fail("", "result must be an object");
    if (r.contains("verdict")) {
        auto v = str(r["verdict"], "/verdict");
        if (v != "certified" && v != "refuted" && v != "inconclusive" && v != "inapplicable") fail("/verdict", "unknown verdict");
        str_list(arr(r, "witness", ""), "/witness");
    }
    if (r.contains("values")) rat_map(obj(r, "values", ""), "/values");
    if (r.contains("pairs")) rat_map(obj(r, "pairs", ""), "/pairs");
    if (r.contains("theta")) rat(r["theta"], "/theta");
    if (r.contains("stats")) {
        const auto& s = obj(r, "stats", "");
        for (auto it = s.begin(); it != s.end(); ++it)
            if (!it.value().is_number_integer()) fail("/stats/" + it.key(), "expected an integer");
    }
}

}  // namespace mvfix::io
