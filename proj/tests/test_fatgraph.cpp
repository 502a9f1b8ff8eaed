#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "torelli/census.hpp"
#include "torelli/fatgraph.hpp"

using namespace torelli;

namespace {

// dart bijections commuting with sigma and iota, by exhaustion
int brute_automorphisms(const FatGraph& g) {
  std::vector<Dart> p(g.num_darts());
  std::iota(p.begin(), p.end(), 0);
  int count = 0;
  do {
    bool ok = true;
    for (Dart d = 0; d < g.num_darts() && ok; ++d)
      ok = p[g.sigma(d)] == g.sigma(p[d]) && p[g.iota(d)] == g.iota(p[d]);
    count += ok;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

FatGraph relabel(const FatGraph& g, const std::vector<Dart>& p) {
  std::vector<Dart> s(g.num_darts()), i(g.num_darts());
  for (Dart d = 0; d < g.num_darts(); ++d) {
    s[p[d]] = p[g.sigma(d)];
    i[p[d]] = p[g.iota(d)];
  }
  return FatGraph::build(s, i);
}

FatGraph figure_eight() { return FatGraph::build({1, 2, 3, 0}, {2, 3, 0, 1}); }

FatGraph one_vertex(int g) {
  const int n = 4 * g;
  std::vector<Dart> s(n), i(n);
  for (int d = 0; d < n; ++d) s[d] = (d + 1) % n;
  for (int k = 0; k < g; ++k) {
    i[4 * k] = 4 * k + 2;
    i[4 * k + 2] = 4 * k;
    i[4 * k + 1] = 4 * k + 3;
    i[4 * k + 3] = 4 * k + 1;
  }
  return FatGraph::build(s, i);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("theta graph invariants") {
  const FatGraph t = theta_graph();
  CHECK(t.num_vertices() == 2);
  CHECK(t.num_edges() == 3);
  CHECK(t.num_boundaries() == 1);
  CHECK(t.genus() == 1);
  CHECK(t.is_trivalent());
  CHECK(t.is_spine());
  CHECK(t.codimension() == 0);
}

TEST_CASE("automorphism counts agree with exhaustion") {
  CHECK(brute_automorphisms(theta_graph()) == 6);
  CHECK(canonical_form(theta_graph()).automorphisms == 6);
  CHECK(brute_automorphisms(figure_eight()) == 4);
  CHECK(canonical_form(figure_eight()).automorphisms == 4);
  const FatGraph g8 = one_vertex(2);
  CHECK(canonical_form(g8).automorphisms == brute_automorphisms(g8));
  CHECK(static_cast<int>(automorphisms(g8).size()) == brute_automorphisms(g8));
}

TEST_CASE("automorphism counts on genus one census graphs") {
  CensusOptions opt;
  opt.max_codim = 1;
  auto db = enumerate_unmarked(1, opt);
  for (const auto& [k, r] : db.records) {
    const FatGraph g = graph_from_key(k);
    CHECK(r.automorphisms == brute_automorphisms(g));
  }
}

TEST_CASE("canonical key is invariant under relabeling") {
  std::mt19937_64 rng(7);
  for (const FatGraph& g : {theta_graph(), seed_spine(2), seed_spine(2, 5), seed_spine(3), one_vertex(2)}) {
    const std::string k = canonical_form(g).key();
    for (int t = 0; t < 20; ++t) {
      std::vector<Dart> p(g.num_darts());
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      const FatGraph h = relabel(g, p);
      CHECK(canonical_form(h).key() == k);
      CHECK(canonical_form(h).automorphisms == canonical_form(g).automorphisms);
      CHECK(isomorphisms(g, h).size() == automorphisms(g).size());
    }
  }
}

TEST_CASE("keys rebuild their graphs") {
  for (const FatGraph& g : {theta_graph(), seed_spine(2), one_vertex(3)}) {
    const auto cf = canonical_form(g);
    const FatGraph h = graph_from_key(cf.key());
    CHECK(canonical_form(h).key() == cf.key());
    CHECK(canonical_graph(g, cf).sigma_perm() == h.sigma_perm());
  }
}

TEST_CASE("labels separate otherwise isomorphic graphs") {
  const FatGraph t = theta_graph();
  std::vector<DartLabel> a(6), b(6);
  a[0] = {1};
  b[1] = {1};
  CHECK(canonical_form(t, a).key() == canonical_form(t, b).key());
  b[1] = {2};
  CHECK(canonical_form(t, a).key() != canonical_form(t, b).key());
  std::vector<DartLabel> c(6);
  c[0] = {1};
  c[3] = {1};
  CHECK(canonical_form(t, c).automorphisms == 2);
}

TEST_CASE("Whitehead move twice returns an isomorphic graph") {
  for (const FatGraph& g : {theta_graph(), seed_spine(2), seed_spine(3, 2)}) {
    for (Dart e : g.edges()) {
      if (g.is_loop(e)) continue;
      const auto mr = whitehead_move(g, e);
      CHECK(mr.graph.genus() == g.genus());
      CHECK(mr.graph.num_boundaries() == 1);
      CHECK(mr.graph.is_trivalent());
      const auto back = whitehead_move(mr.graph, e);
      CHECK(canonical_form(back.graph).key() == canonical_form(g).key());
    }
  }
}

TEST_CASE("move quad and new vertex cycles") {
  const FatGraph t = theta_graph();
  const auto [a, b, c, d] = move_quad(t, 0);
  const auto mr = whitehead_move(t, 0);
  const Dart x = mr.flipped, y = mr.graph.iota(x);
  CHECK(mr.graph.sigma(x) == d);
  CHECK(mr.graph.sigma(d) == a);
  CHECK(mr.graph.sigma(a) == x);
  CHECK(mr.graph.sigma(y) == b);
  CHECK(mr.graph.sigma(b) == c);
  CHECK(mr.graph.sigma(c) == y);
}

TEST_CASE("expansion counts match interval splits") {
  for (int g = 1; g <= 3; ++g) {
    const FatGraph h = one_vertex(g);
    const int k = 4 * g;
    std::set<unsigned> splits;
    for (int start = 0; start < k; ++start)
      for (int len = 2; len <= k - 2; ++len) {
        unsigned m = 0;
        for (int t = 0; t < len; ++t) m |= 1u << ((start + t) % k);
        splits.insert(std::min(m, ~m & ((1u << k) - 1)));
      }
    CHECK(static_cast<int>(all_expansions(h).size()) == k * (k - 3) / 2);
    CHECK(all_expansions(h).size() == splits.size());
    for (const auto& ex : all_expansions(h)) {
      CHECK(ex.graph.genus() == g);
      CHECK(ex.graph.num_edges() == h.num_edges() + 1);
    }
  }
}

TEST_CASE("collapse undoes expansion") {
  const FatGraph h = one_vertex(2);
  for (const auto& ex : all_expansions(h)) {
    const auto c = collapse_edge(ex.graph, ex.first_new);
    CHECK(canonical_form(c.graph).key() == canonical_form(h).key());
  }
}

TEST_CASE("codimension two links") {
  for (const FatGraph& g : {seed_spine(2), seed_spine(3)}) {
    int pent = 0, sq = 0;
    for (auto [e, f] : codim2_edge_pairs(g)) {
      const FatGraph deg = collapse_pair(g, e, f);
      const auto link = link_of_codim2(deg);
      const int a = g.vertex(e), b = g.vertex(g.iota(e));
      const int c = g.vertex(f), d = g.vertex(g.iota(f));
      const bool adjacent = a == c || a == d || b == c || b == d;
      if (adjacent) {
        CHECK(link.kind == CellKind::Pentagon);
        CHECK(link.steps.size() == 5);
        ++pent;
      } else {
        CHECK(link.kind == CellKind::Square);
        CHECK(link.steps.size() == 4);
        ++sq;
      }
      CHECK(deg.codimension() == 2);
    }
    CHECK(pent > 0);
    CHECK(sq > 0);
  }
}

TEST_CASE("fg text round trip") {
  const FatGraph g = seed_spine(2);
  std::map<Dart, std::string> labels{{0, "a"}, {3, "b"}};
  std::istringstream in(format_fg(g, labels) + "hmark 0 1 0 0 0\n");
  const auto f = parse_fg(in);
  CHECK(f.graph.sigma_perm() == g.sigma_perm());
  CHECK(f.graph.iota_perm() == g.iota_perm());
  CHECK(f.labels == labels);
  REQUIRE(f.extra.size() == 1);
  CHECK(f.extra[0].rfind("hmark", 0) == 0);
}

TEST_CASE("invalid input errors") {
  CHECK(code_of([] { FatGraph::build({1, 0}, {0, 1}); }) == ErrorCode::FixedPointInInvolution);
  CHECK(code_of([] { FatGraph::build({0, 1, 2, 3}, {1, 2, 3, 0}); }) == ErrorCode::NotInvolution);
  CHECK(code_of([] { whitehead_move(figure_eight(), 0); }) == ErrorCode::LoopEdge);
  CHECK(code_of([] { collapse_edge(figure_eight(), 0); }) == ErrorCode::LoopEdge);
  CHECK(code_of([] { link_of_codim2(theta_graph()); }) == ErrorCode::WrongDegeneracyType);
  CHECK(code_of([] {
          std::istringstream in("fatgraph 4\niota: 1 0 3\nsigma: 0 1 2 3\n");
          parse_fg(in);
        }) == ErrorCode::Parse);
  CHECK(code_of([] { graph_from_key("6.1"); }) == ErrorCode::Parse);
}
