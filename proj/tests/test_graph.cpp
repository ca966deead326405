#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "percolab/errors.hpp"
#include "percolab/graph.hpp"
#include "percolab/isoperimetry.hpp"
#include "support.hpp"

using namespace percolab;

namespace {

void check_handshake(const Graph& g) {
  std::size_t sum = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    sum += g.degree(v);
    for (const auto& h : g.incident(v)) {
      const Edge& e = g.edge(h.edge);
      CHECK((e.u == v || e.v == v));
      CHECK(e.other(v) == h.neighbor);
    }
  }
  CHECK(sum == 2 * g.edge_count());
}

}  // namespace

TEST_CASE("family sizes") {
  const Graph t = regular_tree(3, 2);
  CHECK(t.vertex_count() == 10);
  CHECK(t.edge_count() == 9);
  CHECK(t.boundary().size() == 6);

  const Graph z = hypercubic(2, 3);
  CHECK(z.vertex_count() == 9);
  CHECK(z.edge_count() == 12);
  CHECK(z.boundary().size() == 8);

  const Graph tri = explicit_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(tri.vertex_count() == 3);
  CHECK(tri.edge_count() == 3);
  CHECK_FALSE(tri.has_boundary());

  CHECK(regular_tree(3, 12).vertex_count() == 3 * 4096 - 2);
}

TEST_CASE("handshake and degree structure") {
  for (const Graph& g : {regular_tree(3, 5), regular_tree(4, 3), hypercubic(2, 6), hypercubic(3, 4),
                         tree_decorated_z3(2, 4)}) {
    check_handshake(g);
  }
  const Graph t = regular_tree(3, 5);
  for (VertexId v = 0; v < t.vertex_count(); ++v) CHECK(t.degree(v) == (t.on_boundary(v) ? 1u : 3u));
}

TEST_CASE("tree leaves hang off the interior") {
  for (const Graph& g : {regular_tree(3, 4), regular_tree(5, 2)}) {
    for (VertexId b : g.boundary()) {
      REQUIRE(g.degree(b) == 1);
      CHECK_FALSE(g.on_boundary(g.incident(b)[0].neighbor));
    }
  }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(regular_tree(2, 3), ParameterError);
  CHECK_THROWS_AS(regular_tree(3, 0), ParameterError);
  CHECK_THROWS_AS(hypercubic(2, 1), ParameterError);
  CHECK_THROWS_AS(hypercubic(0, 4), ParameterError);
  CHECK_THROWS_AS(explicit_graph(2, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(explicit_graph(2, {{0, 0}}), Error);
  CHECK_THROWS_AS(explicit_graph(2, {{0, 2}}), Error);
}

TEST_CASE("json round trip") {
  const Graph g = hypercubic(2, 4);
  const Graph back = graph_from_json(to_json(g));
  CHECK(back.vertex_count() == g.vertex_count());
  REQUIRE(back.edge_count() == g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(back.edge(e) == g.edge(e));
  CHECK(std::vector<VertexId>(back.boundary().begin(), back.boundary().end()) ==
        std::vector<VertexId>(g.boundary().begin(), g.boundary().end()));
  CHECK(back.origin() == g.origin());
  CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"edges", 3}}), FormatError);
}

TEST_CASE("corpus graphs load") {
  const auto files = testing::corpus_files();
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    const Graph g = load_graph(f);
    CHECK(g.edge_count() <= 12);
    check_handshake(g);
  }
}

TEST_CASE("cheeger on the tree ball") {
  // connected k-sets in a 3-regular tree: |∂K| = k + 2, vol = 3k
  const Graph t = regular_tree(3, 4);
  Fraction previous{1, 1};
  for (int size = 1; size <= 8; ++size) {
    const auto r = cheeger_exact(t, size);
    CHECK(r.cheeger_lower == Fraction{size + 2, 3 * size});
    CHECK_FALSE(previous < r.cheeger_lower);
    CHECK(Fraction{1, 3} < r.cheeger_lower);
    previous = r.cheeger_lower;
    CHECK(static_cast<int>(r.cheeger_witness.size()) == size);
  }
}

TEST_CASE("cheeger on the square grid decreases") {
  const Graph z = hypercubic(2, 7);
  const auto r4 = cheeger_exact(z, 4), r6 = cheeger_exact(z, 6), r8 = cheeger_exact(z, 8);
  CHECK(r4.cheeger_lower == Fraction{1, 2});   // 2x2 square
  CHECK(r6.cheeger_lower == Fraction{5, 12});  // 2x3 rectangle
  CHECK(r8.cheeger_lower == Fraction{3, 8});
  CHECK(r6.cheeger_lower < r4.cheeger_lower);
  CHECK(r8.cheeger_lower < r6.cheeger_lower);
}

TEST_CASE("cheeger witness attains the minimum and the profile is monotone") {
  const Graph g = hypercubic(2, 6);
  const auto r = cheeger_exact(g, 7);
  std::int64_t boundary = 0, volume = 0;
  for (VertexId v : r.cheeger_witness) {
    volume += g.degree(v);
    for (const auto& h : g.incident(v)) {
      if (std::find(r.cheeger_witness.begin(), r.cheeger_witness.end(), h.neighbor) == r.cheeger_witness.end()) {
        ++boundary;
      }
    }
  }
  CHECK(Fraction{boundary, volume} == r.cheeger_lower);
  std::int64_t last = -1;
  for (const auto& [t, psi] : r.profile) {
    CHECK(psi >= last);
    last = psi;
  }
}

TEST_CASE("cheeger edge cases") {
  const Graph edge = explicit_graph(2, {{0, 1}});
  CHECK(cheeger_exact(edge, 2).cheeger_lower == Fraction{1, 1});
  CHECK_THROWS_AS(cheeger_exact(regular_tree(3, 4), kMaxCheegerSetSize + 1), SizeError);
}
