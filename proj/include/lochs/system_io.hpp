#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lochs/disintegration.hpp"

namespace lochs {

using Json = nlohmann::json;

// JSON system file layout (all sections optional; commands state their needs):
//   measure_space: { levels: [ { points: [..], sigma: [[..],..] }, .. ],
//                    weights: { point: "p/q" | integer } }
//   hilbert_chains: { name: { dims: [..] } }
//   fibers: { point: [per-level dims] }
//   operators: { name: { kind: "levels", chain: name | "space": true,
//                        blocks: [matrix, ..] }
//              | { name: { kind: "fibers", families: { point: [matrix, ..] } } }
//   presentations: { name: { chain: name, generators: [operator names] } }
//   tolerances: { field: number }
// Complex scalars are numbers or [re, im] pairs; matrices are row arrays.

struct OperatorSpec {
    std::string kind; // "levels" or "fibers"
    std::string chain;
    bool on_space = false;
    std::vector<CMatrix> blocks;
    FiberOperatorFamily families;
};

struct PresentationSpec {
    std::string chain;
    std::vector<std::string> generators;
};

struct SystemDescription {
    bool has_measure = false;
    MeasureChain measure;
    std::map<std::string, HilbertChain> chains;
    bool has_fibers = false;
    std::map<std::string, std::vector<std::size_t>> fiber_dims;
    std::map<std::string, OperatorSpec> operators;
    std::map<std::string, PresentationSpec> presentations;
    Tolerances tol;
    std::string digest;
};

cplx json_to_cplx(const Json& j);
Json cplx_to_json(cplx v); // always [re, im]
CMatrix json_to_matrix(const Json& j);
Json matrix_to_json(const CMatrix& m);

// Overlay of known tolerance fields; unknown keys are rejected.
Tolerances tolerances_from_json(const Json& j, Tolerances base);

std::string fnv1a_digest(const std::string& bytes);

SystemDescription parse_system(const std::string& text); // throws ParseError
SystemDescription load_system(const std::string& path);  // throws ParseError
Tolerances load_tolerances_file(const std::string& path, Tolerances base);

// Assembly helpers shared by the commands and the python module.
DirectIntegralSpace system_space(const SystemDescription& sys); // needs measure + fibers
LocalOperator resolve_level_operator(const SystemDescription& sys, const DirectIntegralSpace* space,
                                     const std::string& name); // UnknownName
AbelianPresentation resolve_presentation(const SystemDescription& sys, const std::string& name);

} // namespace lochs
