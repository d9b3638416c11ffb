#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "causalcat/dag.hpp"

namespace testing {

using causalcat::Dag;
using causalcat::DagPtr;
using causalcat::VertexSet;
using causalcat::Word;

// make({"x","y","z"}, {{"x","y"},{"y","z"}})
inline DagPtr make(std::vector<std::string> names, const std::vector<std::pair<std::string, std::string>>& edges) {
  return std::make_shared<const Dag>(causalcat::build_dag(std::move(names), edges));
}

inline DagPtr chain() { return make({"x", "y", "z"}, {{"x", "y"}, {"y", "z"}}); }
inline DagPtr fork() { return make({"x", "y", "z"}, {{"y", "x"}, {"y", "z"}}); }
inline DagPtr reversed_chain() { return make({"x", "y", "z"}, {{"z", "y"}, {"y", "x"}}); }
inline DagPtr collider() { return make({"x", "y", "z"}, {{"x", "z"}, {"y", "z"}}); }
inline DagPtr edge() { return make({"x", "y"}, {{"x", "y"}}); }

// Comma-separated vertex names; "" is the empty set.
inline std::vector<std::string> split(const std::string& names) {
  std::vector<std::string> out;
  std::stringstream ss(names);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline VertexSet S(const Dag& dag, const std::string& names) { return dag.set_of(split(names)); }
inline Word W(const Dag& dag, const std::string& names) { return dag.word_of(split(names)); }

inline DagPtr share(Dag dag) { return std::make_shared<const Dag>(std::move(dag)); }

}  // namespace testing
