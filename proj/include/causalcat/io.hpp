#pragma once

#include <string>

#include "causalcat/dag.hpp"
#include "causalcat/semantics.hpp"

namespace causalcat {

// {"vertices": ["x","y"], "edges": [["x","y"]]}. Throws ParseError for
// malformed JSON or a wrong schema, and the dag-core errors for invalid graphs.
Dag parse_dag_json(const std::string& text);
std::string dag_to_json(const Dag& dag);

// {"card": {"x": 2}, "kernels": {"x": [[...], ...]}}: kernels[v] lists the
// rows of the card(v) x prod card(pa(v)) matrix; columns follow parent states
// in Dag order, last parent fastest. Missing cardinalities default to 2.
CbnModel parse_model_json(DagPtr dag, const std::string& text);
std::string model_to_json(const CbnModel& model);

// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace causalcat
