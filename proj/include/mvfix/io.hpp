#pragma once
// JSON (schema "v1") readers and writers for models, valuations and results.
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "mvfix/games.hpp"
#include "mvfix/models/bisim.hpp"
#include "mvfix/models/markov.hpp"
#include "mvfix/models/mts.hpp"
#include "mvfix/models/pa.hpp"

namespace mvfix::io {

using json = nlohmann::ordered_json;

// Carries the JSON path (or parser position) of the offending field.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);

enum class ModelKind { MarkovChain, Mts, Lts, Pa, Ssg, FnExpr };
const char* model_kind_name(ModelKind k);
// Uses the "kind" field when present, otherwise the characteristic keys.
ModelKind detect_kind(const json& j);

MarkovChain parse_mc(const json& j);
MetricTS parse_mts(const json& j);
TransitionSystem parse_lts(const json& j);
ProbAutomaton parse_pa(const json& j);
Ssg parse_ssg(const json& j);
FnPtr parse_fnexpr(const json& j);

json to_json(const MarkovChain& mc);
json to_json(const MetricTS& m);
json to_json(const TransitionSystem& ts);
json to_json(const ProbAutomaton& pa);
json to_json(const Ssg& g);

// Any model as an endofunction with its approximations.
std::unique_ptr<FixpointFunction> load_function(const json& j);

// {values:{id:v}} or {pairs:{"s,t":v}}, optional "default"; `fallback` overrides the document default.
Valuation parse_valuation(const json& j, const UniversePtr& u, const Chain& chain,
                          const std::optional<Rational>& fallback = std::nullopt);
json valuation_to_json(const Valuation& a);

json certificate_to_json(const Certificate& c);
json strategy_to_json(const Ssg& g, const Strategy& s);
json solution_to_json(const Ssg& g, const GameSolution& s, const std::string& method);

// Re-parses a result document and checks it against the documented shape.
void validate_result(const json& j);

}  // namespace mvfix::io
