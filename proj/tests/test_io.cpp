#include <random>

#include "causalcat/errors.hpp"
#include "causalcat/io.hpp"
#include "causalcat/semantics.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace causalcat;

TEST_SUITE("io") {
  TEST_CASE("DAG JSON") {
    const Dag d = parse_dag_json(R"({"vertices": ["x","y","z"], "edges": [["x","y"],["y","z"]]})");
    CHECK(d == *testing::chain());
    CHECK(parse_dag_json(dag_to_json(d)) == d);
    CHECK(parse_dag_json(R"({"vertices": ["x"]})").size() == 1);
  }

  TEST_CASE("DAG JSON errors carry the field") {
    auto message = [](const std::string& text) {
      try {
        parse_dag_json(text);
      } catch (const ParseError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("{").find("invalid JSON") != std::string::npos);
    CHECK(message(R"({"edges": []})").find("vertices") != std::string::npos);
    CHECK(message(R"({"vertices": ["x", 3]})").find("dag.vertices[1]") != std::string::npos);
    CHECK(message(R"({"vertices": ["x","y"], "edges": [["x"]]})").find("dag.edges[0]") != std::string::npos);
    CHECK_THROWS_AS(parse_dag_json(R"({"vertices": ["x","y"], "edges": [["x","y"],["y","x"]]})"), CycleError);
    CHECK_THROWS_AS(parse_dag_json(R"({"vertices": ["a b"]})"), InvalidVertexName);
    CHECK_THROWS_AS(parse_dag_json(R"({"vertices": [""]})"), InvalidVertexName);
  }

  TEST_CASE("model JSON") {
    const DagPtr c3 = testing::chain();
    const CbnModel m = parse_model_json(c3, R"({"kernels": {"x": [[0.6],[0.4]], "y": [[0.9,0.2],[0.1,0.8]], "z": [[0.7,0.3],[0.3,0.7]]}})");
    CHECK(m.card() == std::vector<int>{2, 2, 2});
    CHECK(m.kernel(Vertex(1))(1, 0) == 0.1);

    CHECK_THROWS_AS(parse_model_json(c3, R"({"kernels": {"x": [[0.6],[0.4]], "y": [[0.9,0.2],[0.1,0.8]]}})"), ParseError);
    CHECK_THROWS_AS(parse_model_json(c3, R"({"kernels": {"q": [[1.0]]}})"), ParseError);
    CHECK_THROWS_AS(parse_model_json(c3, R"({"kernels": {"x": [[0.6],[0.4,0.1]]}})"), ParseError);
    CHECK_THROWS_AS(parse_model_json(c3, R"({"card": {"x": 0}, "kernels": {}})"), ParseError);
    // Shape and stochasticity are checked by the model itself.
    CHECK_THROWS_AS(parse_model_json(c3, R"({"kernels": {"x": [[0.6],[0.5]], "y": [[0.9,0.2],[0.1,0.8]], "z": [[0.7,0.3],[0.3,0.7]]}})"),
                    BadModel);
  }

  TEST_CASE("model JSON round trip on random models") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
      const DagPtr dag = testing::share(oracle::random_dag(rng, 1 + i % 5));
      std::vector<int> card;
      for (std::size_t v = 0; v < dag->size(); ++v) card.push_back(2 + static_cast<int>((v + i) % 2));
      const CbnModel m = random_positive_model(dag, card, static_cast<std::uint64_t>(i));
      const CbnModel back = parse_model_json(dag, model_to_json(m));
      CHECK(back.card() == m.card());
      for (Vertex v : dag->vertices()) CHECK(back.kernel(v) == m.kernel(v));
      CHECK(parse_dag_json(dag_to_json(*dag)) == *dag);
    }
  }

  TEST_CASE("missing file") { CHECK_THROWS_AS(read_file("/nonexistent/causalcat.json"), ParseError); }
}
