#include "causalcat/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace causalcat {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) throw ParseError(where + ": missing field \"" + name + "\"");
  return obj.at(name);
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

Dag parse_dag_json(const std::string& text) {
  const json doc = parse(text);
  const json& vs = field(doc, "vertices", "dag");
  if (!vs.is_array()) throw ParseError("dag.vertices: expected an array");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < vs.size(); ++i) names.push_back(as_string(vs[i], "dag.vertices[" + std::to_string(i) + "]"));
  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.contains("edges")) {
    const json& es = doc.at("edges");
    if (!es.is_array()) throw ParseError("dag.edges: expected an array");
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string where = "dag.edges[" + std::to_string(i) + "]";
      if (!es[i].is_array() || es[i].size() != 2) throw ParseError(where + ": expected a [source, target] pair");
      edges.emplace_back(as_string(es[i][0], where + "[0]"), as_string(es[i][1], where + "[1]"));
    }
  }
  return build_dag(std::move(names), edges);
}

std::string dag_to_json(const Dag& dag) {
  json edges = json::array();
  for (const auto& [a, b] : dag.edges()) edges.push_back({dag.name(a), dag.name(b)});
  return json{{"vertices", dag.names()}, {"edges", edges}}.dump();
}

CbnModel parse_model_json(DagPtr dag, const std::string& text) {
  const json doc = parse(text);
  std::vector<int> card(dag->size(), 2);
  if (doc.contains("card")) {
    const json& cs = doc.at("card");
    if (!cs.is_object()) throw ParseError("model.card: expected an object");
    for (const auto& [name, value] : cs.items()) {
      const auto v = dag->find(name);
      if (!v) throw ParseError("model.card." + name + ": unknown vertex");
      if (!value.is_number_integer() || value.get<int>() < 1) throw ParseError("model.card." + name + ": expected a positive integer");
      card[v->index()] = value.get<int>();
    }
  }
  const json& ks = field(doc, "kernels", "model");
  if (!ks.is_object()) throw ParseError("model.kernels: expected an object");
  std::vector<StochMatrix> kernels(dag->size());
  std::vector<bool> seen(dag->size(), false);
  for (const auto& [name, rows] : ks.items()) {
    const std::string where = "model.kernels." + name;
    const auto v = dag->find(name);
    if (!v) throw ParseError(where + ": unknown vertex");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw ParseError(where + ": expected a list of rows");
    StochMatrix k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != rows[0].size()) {
        throw ParseError(where + "[" + std::to_string(r) + "]: rows must have equal length");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        if (!rows[r][c].is_number()) throw ParseError(where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]: expected a number");
        k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
      }
    }
    kernels[v->index()] = std::move(k);
    seen[v->index()] = true;
  }
  for (Vertex v : dag->vertices()) {
    if (!seen[v.index()]) throw ParseError("model.kernels: missing kernel for " + dag->name(v));
  }
  return CbnModel(std::move(dag), std::move(card), std::move(kernels));
}

std::string model_to_json(const CbnModel& model) {
  const Dag& dag = model.dag();
  json card = json::object();
  json kernels = json::object();
  for (Vertex v : dag.vertices()) {
    card[dag.name(v)] = model.card(v);
    json rows = json::array();
    const StochMatrix& k = model.kernel(v);
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back(k(r, c));
      rows.push_back(row);
    }
    kernels[dag.name(v)] = rows;
  }
  return json{{"card", card}, {"kernels", kernels}}.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace causalcat
