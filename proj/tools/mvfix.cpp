// mvfix: certify fixpoint bounds and solve the bundled model kinds from JSON inputs.
#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "mvfix/io.hpp"
#include "mvfix/selftest.hpp"

using namespace mvfix;
using io::json;

namespace {

enum Exit { Ok = 0, Negative = 1, InputError = 2 };

struct Options {
    std::string model, candidate, fallback, format = "table", method = "sia", pair, lp_dump, init;
    bool json = false, dual = false;
    double tol = 1e-12;
    std::optional<unsigned long> seed;
};

const std::string& fmt(const Options& o) {
    static const std::string j = "json";
    return o.json ? j : o.format;
}

void print_rows(const Options& o, const std::vector<std::pair<std::string, std::string>>& rows, const char* head) {
    if (fmt(o) == "csv") {
        std::cout << "id," << head << "\n";
        for (auto& [k, v] : rows) std::cout << k << "," << v << "\n";
        return;
    }
    size_t w = 2;
    for (auto& r : rows) w = std::max(w, r.first.size());
    std::cout << std::left << std::setw(int(w) + 2) << "id" << head << "\n";
    for (auto& [k, v] : rows) std::cout << std::setw(int(w) + 2) << k << v << "\n";
}

void print_valuation(const Options& o, const Valuation& a, const char* head = "value") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (size_t i = 0; i < a.size(); ++i) rows.emplace_back(a.universe()->id(i), format_rational(a[i]));
    print_rows(o, rows, head);
}

void emit(const Options& o, const json& j, const std::function<void()>& human) {
    if (fmt(o) == "json") {
        io::validate_result(j);
        std::cout << j.dump(2) << "\n";
    } else {
        human();
    }
}

int certificate_exit(const Certificate& c) {
    switch (c.verdict) {
        case Verdict::Certified: return Ok;
        case Verdict::Refuted:
        case Verdict::Inconclusive: return Negative;
        case Verdict::Inapplicable: return InputError;
    }
    return InputError;
}

void print_certificate(const Options& o, const Certificate& c) {
    emit(o, io::certificate_to_json(c), [&] {
        std::string w;
        for (auto& n : c.witness.names()) w += (w.empty() ? "" : " ") + ("(" + n + ")");
        if (fmt(o) == "csv") {
            std::cout << "verdict,witness\n" << verdict_name(c.verdict) << ",\"" << w << "\"\n";
            return;
        }
        std::cout << "verdict  " << verdict_name(c.verdict) << "\nwitness  {" << w << "}\n";
        if (c.theta) std::cout << "theta    " << format_rational(*c.theta) << "\n";
        if (!c.note.empty()) std::cout << "note     " << c.note << "\n";
    });
}

std::optional<Rational> fallback_value(const Options& o) {
    if (o.fallback.empty()) return std::nullopt;
    return parse_rational(o.fallback);
}

Valuation load_candidate(const Options& o, const FixpointFunction& f) {
    if (o.candidate.empty()) throw io::SchemaError("a candidate valuation is required (--candidate FILE)");
    return io::parse_valuation(io::read_json_file(o.candidate), f.universe(), f.chain(), fallback_value(o));
}

int run_check(const Options& o, const std::string& which) {
    auto f = io::load_function(io::read_json_file(o.model));
    Valuation a = load_candidate(o, *f);
    Certificate c = which == "check-gfp"       ? is_greatest_fixpoint(*f, a)
                    : which == "check-lfp"     ? is_least_fixpoint(*f, a)
                    : which == "certify-upper" ? certify_upper_bound(*f, a)
                                               : certify_lower_bound(*f, a);
    print_certificate(o, c);
    return certificate_exit(c);
}

int run_improve(const Options& o) {
    auto f = io::load_function(io::read_json_file(o.model));
    Valuation a = load_candidate(o, *f);
    if (!(f->eval(a) == a)) {
        std::cerr << "improve: the candidate is not a fixpoint\n";
        return InputError;
    }
    try {
        Jump j = o.dual ? improve_pre_fixpoint(*f, a) : improve_post_fixpoint(*f, a);
        json out{{"values", io::valuation_to_json(j.value)}, {"theta", format_rational(j.theta)}, {"witness", j.witness.names()}};
        emit(o, out, [&] {
            print_valuation(o, j.value);
            if (fmt(o) == "table") std::cout << "theta " << format_rational(j.theta) << "\n";
        });
        return Ok;
    } catch (const NothingToImprove& e) {
        if (fmt(o) == "json") std::cout << json{{"verdict", "certified"}, {"witness", json::array()}, {"note", e.what()}}.dump(2) << "\n";
        else std::cout << "nothing to improve: the candidate is already " << (o.dual ? "least" : "greatest") << "\n";
        return Negative;
    }
}

int run_values(const Options& o, const Valuation& v, json extra = json::object()) {
    extra["values"] = io::valuation_to_json(v);
    emit(o, extra, [&] { print_valuation(o, v); });
    return Ok;
}

int run_term_prob(const Options& o) {
    auto mc = io::parse_mc(io::read_json_file(o.model));
    if (o.method == "jumps") {
        auto r = term_prob_via_jumps(mc);
        return run_values(o, r.value, {{"stats", {{"jumps", r.jumps}, {"inner_solves", r.inner_solves}}}});
    }
    return run_values(o, term_prob_exact(mc));
}

int run_mts(const Options& o) {
    auto r = mts_distance(io::parse_mts(io::read_json_file(o.model)));
    return run_values(o, r.value, {{"stats", {{"jumps", r.jumps}, {"inner_solves", r.inner_solves}}}});
}

int run_bisim(const Options& o) {
    auto ts = io::parse_lts(io::read_json_file(o.model));
    if (o.candidate.empty()) throw io::SchemaError("a candidate valuation is required");
    auto a = io::parse_valuation(io::read_json_file(o.candidate), ts.pairs, Chain::boolean(), fallback_value(o));
    auto comma = o.pair.find(',');
    if (comma == std::string::npos) throw io::SchemaError("--pair expects two state ids separated by a comma");
    Certificate c = witness_nonbisim(ts, a, o.pair.substr(0, comma), o.pair.substr(comma + 1));
    print_certificate(o, c);
    return certificate_exit(c);
}

int run_pa(const Options& o) {
    auto pa = io::parse_pa(io::read_json_file(o.model));
    if (!o.candidate.empty()) {
        auto d = io::parse_valuation(io::read_json_file(o.candidate), pa.pairs, Chain::unit(), fallback_value(o));
        Subset s = largest_self_closed(pa, d);
        // The distance is least exactly when no pair has slack.
        Certificate c = detail::from_witness(s, Verdict::Refuted, "largest self-closed relation");
        print_certificate(o, c);
        return certificate_exit(c);
    }
    PaStats st;
    auto d = pa_distance(pa, &st);
    return run_values(o, d, {{"stats", {{"jumps", st.jumps}, {"inner_solves", st.inner_solves}, {"coupling_rounds", st.coupling_rounds}}}});
}

// "node=target,node=target" overrides of the initial strategies.
void apply_init(const Ssg& g, const std::string& spec, Strategy& mins, Strategy& maxs) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw io::SchemaError("--init: expected node=target, got '" + item + "'");
        size_t v = g.nodes->at(item.substr(0, eq)), t = g.nodes->at(item.substr(eq + 1));
        Strategy& s = g.kind[v] == NodeKind::Min ? mins : maxs;
        if (g.kind[v] != NodeKind::Min && g.kind[v] != NodeKind::Max) throw io::SchemaError("--init: '" + item.substr(0, eq) + "' is not a choice node");
        s.choice[v] = t;
        check_strategy(g, s);
    }
}

int run_ssg(const Options& o) {
    auto g = io::parse_ssg(io::read_json_file(o.model));
    Strategy tau = initial_strategy(g, NodeKind::Min), sigma = initial_strategy(g, NodeKind::Max);
    if (o.seed) {
        std::mt19937_64 rng(*o.seed);
        tau = random_strategy(g, NodeKind::Min, rng);
        sigma = random_strategy(g, NodeKind::Max, rng);
    }
    if (!o.init.empty()) apply_init(g, o.init, tau, sigma);

    if (o.method == "ki") {
        auto r = kleene_value_iteration(g, o.tol);
        json values = json::object();
        std::vector<std::pair<std::string, std::string>> rows;
        for (size_t v = 0; v < g.size(); ++v) {
            values[g.nodes->id(v)] = r.values[v];
            std::ostringstream s;
            s << std::setprecision(17) << r.values[v];
            rows.emplace_back(g.nodes->id(v), s.str());
        }
        json out{{"method", "ki"}, {"approx_values", values}, {"stats", {{"iterations", r.steps}}}};
        emit(o, out, [&] { print_rows(o, rows, "value"); });
        return Ok;
    }

    std::ofstream dump;
    if (!o.lp_dump.empty()) {
        dump.open(o.lp_dump);
        if (!dump) throw io::SchemaError(o.lp_dump + ": cannot write");
    }
    std::ostream* trace = dump.is_open() ? &dump : nullptr;
    GameSolution sol = o.method == "sib" ? strategy_iteration_below(g, sigma, trace) : strategy_iteration_above(g, tau, trace);
    emit(o, io::solution_to_json(g, sol, o.method), [&] {
        print_valuation(o, sol.values);
        if (fmt(o) == "table")
            std::cout << "iterations " << sol.stats.iterations << ", jumps " << sol.stats.jumps << ", lp calls "
                      << sol.stats.lp_calls << "\n";
    });
    return Ok;
}

int run_corpus(const Options& o) {
    auto rows = mvfix::run_selftest();
    bool all = true;
    json out = json::array();
    for (auto& r : rows) {
        all = all && r.pass;
        out.push_back(json{{"name", r.name}, {"pass", r.pass}, {"expected", r.expected}, {"got", r.got}, {"ms", r.ms}});
    }
    if (fmt(o) == "json") {
        std::cout << out.dump(2) << "\n";
    } else if (fmt(o) == "csv") {
        std::cout << "name,result,ms\n";
        for (auto& r : rows) std::cout << '"' << r.name << "\"," << (r.pass ? "PASS" : "FAIL") << "," << r.ms << "\n";
    } else {
        for (auto& r : rows) {
            std::cout << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(40) << r.name << std::right << std::fixed
                      << std::setprecision(1) << std::setw(8) << r.ms << " ms\n";
            if (!r.pass) std::cout << "      expected " << r.expected << "\n      got      " << r.got << "\n";
        }
    }
    return all ? Ok : Negative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixpoint certification and solvers over MV-chain valuations"};
    app.require_subcommand(1, 1);
    Options o;

    auto common = [&](CLI::App* s, bool model = true) {
        if (model) s->add_option("model", o.model, "model JSON file")->required()->check(CLI::ExistingFile);
        s->add_flag("--json", o.json, "machine-readable output (same as --format json)");
        s->add_option("--format", o.format, "table, json or csv")->check(CLI::IsMember({"table", "json", "csv"}));
    };
    auto with_candidate = [&](CLI::App* s) {
        s->add_option("candidate-file", o.candidate, "candidate valuation JSON file")->check(CLI::ExistingFile);
        s->add_option("--candidate", o.candidate, "candidate valuation JSON file")->check(CLI::ExistingFile);
        s->add_option("--default", o.fallback, "value for ids missing from the candidate");
    };

    std::map<std::string, CLI::App*> subs;
    for (auto [name, help] : {std::pair{"check-gfp", "is the candidate the greatest fixpoint?"},
                              {"check-lfp", "is the candidate the least fixpoint?"},
                              {"certify-upper", "certify that a pre-fixpoint bounds the greatest fixpoint"},
                              {"certify-lower", "certify that a post-fixpoint bounds the least fixpoint"}}) {
        subs[name] = app.add_subcommand(name, help);
        common(subs[name]);
        with_candidate(subs[name]);
    }
    subs["improve"] = app.add_subcommand("improve", "jump from a non-extremal fixpoint");
    common(subs["improve"]);
    with_candidate(subs["improve"]);
    subs["improve"]->add_flag("--dual", o.dual, "move down towards the least fixpoint");

    subs["term-prob"] = app.add_subcommand("term-prob", "termination probabilities of a Markov chain");
    common(subs["term-prob"]);
    subs["term-prob"]->add_option("--method", o.method, "exact or jumps")->check(CLI::IsMember({"exact", "jumps"}));

    subs["mts-dist"] = app.add_subcommand("mts-dist", "behavioural distance of a metric transition system");
    common(subs["mts-dist"]);

    subs["bisim-witness"] = app.add_subcommand("bisim-witness", "certify that two states are not bisimilar");
    common(subs["bisim-witness"]);
    with_candidate(subs["bisim-witness"]);
    subs["bisim-witness"]->add_option("--pair", o.pair, "x,y")->required();

    subs["pa-dist"] = app.add_subcommand("pa-dist", "behavioural distance of a probabilistic automaton");
    common(subs["pa-dist"]);
    with_candidate(subs["pa-dist"]);

    subs["ssg-solve"] = app.add_subcommand("ssg-solve", "solve a simple stochastic game");
    common(subs["ssg-solve"]);
    subs["ssg-solve"]->add_option("--method", o.method, "sia, sib or ki")->check(CLI::IsMember({"sia", "sib", "ki"}));
    subs["ssg-solve"]->add_option("--tol", o.tol, "stopping tolerance for ki")->check(CLI::PositiveNumber);
    subs["ssg-solve"]->add_option("--seed", o.seed, "randomize the initial strategies");
    subs["ssg-solve"]->add_option("--init", o.init, "initial choices, e.g. max=av,min=one");
    subs["ssg-solve"]->add_option("--lp-dump", o.lp_dump, "write every LP solved to this file");

    subs["selftest"] = app.add_subcommand("selftest", "run the bundled example corpus");
    common(subs["selftest"], false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return InputError;
    }

    try {
        std::string name = app.get_subcommands().front()->get_name();
        if (name.rfind("check-", 0) == 0 || name.rfind("certify-", 0) == 0) return run_check(o, name);
        if (name == "improve") return run_improve(o);
        if (name == "term-prob") {
            if (subs["term-prob"]->count("--method") == 0) o.method = "exact";
            return run_term_prob(o);
        }
        if (name == "mts-dist") return run_mts(o);
        if (name == "bisim-witness") return run_bisim(o);
        if (name == "pa-dist") return run_pa(o);
        if (name == "ssg-solve") return run_ssg(o);
        return run_corpus(o);
    } catch (const io::SchemaError& e) {
        std::cerr << "input error: " << e.what() << "\n";
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
    } catch (const PreconditionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
    } catch (const UnsupportedClosedForm& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
    }
    return InputError;
}
