#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "torelli/census.hpp"
#include "torelli/cocycle.hpp"

using namespace torelli;

namespace {

using V = IntVector;

V random_vector(std::mt19937_64& rng, int n) {
  V v(n);
  for (auto& x : v) x = static_cast<std::int64_t>(rng() % 13) - 6;
  return v;
}

std::array<V, 4> basis4() {
  std::array<V, 4> v;
  for (int i = 0; i < 4; ++i) {
    v[i] = V(4, 0);
    v[i][i] = 1;
  }
  return v;
}

MarkedGraph load_marked(const std::string& name) {
  std::ifstream in(std::string(TORELLI_DATA_DIR) + "/" + name);
  REQUIRE(in);
  const auto f = parse_fg(in);
  const auto om = parse_omega(f.extra);
  REQUIRE(om);
  const auto m = parse_hmarks(f.graph, f.extra, *om);
  REQUIRE(m);
  return {f.graph, *m};
}

// j(i, i+n) summed forward from vertex 0, then the fan from vertex 0:
// sum_{i=1..n-2} j(i, i+1) ^ j(0, i)
MultiWedge fan_from_zero(const std::vector<Wedge3>& jv) {
  const int n = static_cast<int>(jv.size());
  MultiWedge out(jv[0].dim(), 2);
  Wedge3 to_i = jv[0];
  for (int i = 1; i + 1 < n; ++i) {
    out += wedge_product(jv[i], to_i);
    to_i += jv[i];
  }
  return out;
}

MoveSequence random_walk(const FatGraph& g, const HomologyMarking& m, int len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MoveSequence s{g, m, {}};
  FatGraph cur = g;
  for (int i = 0; i < len; ++i) {
    const auto es = cur.edges();
    const Dart e = es[rng() % es.size()];
    s.steps.push_back(e);
    cur = whitehead_move(cur, e).graph;
  }
  return s;
}

}  // namespace

TEST_CASE("pentagon identity") {
  const auto v = basis4();
  Wedge3 sum(4);
  for (const auto& w : pentagon_terms(v[0], v[1], v[2], v[3])) sum += w;
  CHECK(sum.is_zero());
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const V a = random_vector(rng, n), b = random_vector(rng, n), c = random_vector(rng, n), d = random_vector(rng, n);
    Wedge3 s(n);
    for (const auto& w : pentagon_terms(a, b, c, d)) s += w;
    CHECK(s.is_zero());
    Wedge3 s2(n);
    for (const auto& w : pentagon_boundary(a, b, c, d)) s2 += w;
    CHECK(s2.is_zero());
  }
}

TEST_CASE("cup square on the pentagon") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    std::array<V, 4> v = basis4();
    if (t > 0)
      for (auto& x : v) x = random_vector(rng, 5);
    const auto jv = pentagon_boundary(v[0], v[1], v[2], v[3]);
    const MultiWedge expected = pentagon_cup_value(v[0], v[1], v[2], v[3]);
    for (int apex = 0; apex < 5; ++apex) {
      CHECK(cup_square_from_boundary(jv, apex) == expected);
      CHECK(cup_power_on_chain(fan_chain(jv, apex)) == expected);
    }
    CHECK(fan_from_zero(jv) == expected);
    // the expansion with e eliminated carries cba^abc = 0 and misses 2 abc^bcd
    const MultiWedge elim = pentagon_cup_eliminated(v[0], v[1], v[2], v[3]);
    CHECK(expected - elim == 2 * wedge_product(wedge3(v[0], v[1], v[2]), wedge3(v[1], v[2], v[3])));
  }
}

TEST_CASE("torus bounding pair corpus") {
  const auto rep = verify_identity_corpus(50, 1);
  const auto v = basis4();
  const Wedge3 abc = wedge3(v[0], v[1], v[2]);
  REQUIRE(rep.names.size() == 3);
  for (const auto& w : rep.basis_values) CHECK(w == 2 * abc);
  CHECK(rep.total == 6 * abc);
  CHECK(rep.random_points == 50);
}

TEST_CASE("path sums") {
  const FatGraph g = seed_spine(2);
  const auto m = tautological_marking(g);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MoveSequence s = random_walk(g, m, 15, seed);
    CHECK((j_path(s) + j_path(s.reversed())).is_zero());
    const MarkedGraph mid = MoveSequence{g, m, {s.steps.begin(), s.steps.begin() + 7}}.end();
    const MoveSequence first{g, m, {s.steps.begin(), s.steps.begin() + 7}};
    const MoveSequence second{mid.graph, mid.marking, {s.steps.begin() + 7, s.steps.end()}};
    CHECK(j_path(first) + j_path(second) == j_path(s));
  }
  for (Dart e : g.edges()) CHECK(j_path({g, m, {e, e}}).is_zero());
}

TEST_CASE("j is the wedge of the move neighbors") {
  const FatGraph t = theta_graph();
  const auto m = tautological_marking(t);
  for (Dart e = 0; e < t.num_darts(); ++e) {
    const auto [a, b, c, d] = move_quad(t, e);
    CHECK(j_move(t, m, e) == wedge3(m[a], m[b], m[c]));
    CHECK(j_move(t, m, e) == wedge3(m[c], m[d], m[a]));
  }
}

TEST_CASE("cocycle residuals vanish on the cells of a marked graph") {
  const auto mg = load_marked("genus2_marked.fg");
  int pentagons = 0, squares = 0;
  for (auto [e, f] : codim2_edge_pairs(mg.graph)) {
    const TwoCell c = two_cell_at(mg.graph, mg.marking, e, f);
    CHECK(verify_cocycle(c).ok);
    (c.kind == TwoCellKind::Pentagon ? pentagons : squares)++;
    const auto jv = boundary_values(c);
    const MultiWedge base = cup_square_on_cell(c, 0);
    for (int apex = 1; apex < c.size(); ++apex) CHECK(cup_square_on_cell(c, apex) == base);
    CHECK(fan_from_zero(jv) == base);
  }
  CHECK(pentagons > 0);
  CHECK(squares > 0);
}

TEST_CASE("contraction cocycles on a pentagon cell") {
  const auto mg = load_marked("genus2_marked.fg");
  const auto pairs = codim2_edge_pairs(mg.graph);
  REQUIRE(pairs.size() > 26);
  const TwoCell c = two_cell_at(mg.graph, mg.marking, pairs[26].first, pairs[26].second);
  CHECK(c.kind == TwoCellKind::Pentagon);
  for (int apex = 0; apex < 5; ++apex) {
    CHECK(contraction_cocycle(c, theta_pairing_graph(), mg.marking.omega, apex) == -12);
    CHECK(contraction_cocycle(c, two_loop_graph(), mg.marking.omega, apex) == -8);
  }
}

TEST_CASE("equivariance under automorphisms") {
  for (const FatGraph& g : {theta_graph(), seed_spine(2)}) {
    const auto m = tautological_marking(g);
    const MoveSequence s = random_walk(g, m, 6, 4);
    for (const auto& phi : automorphisms(g)) {
      const auto M = induced_basis_change(g, m, m, phi);
      REQUIRE(M);
      CHECK(equivariance_check(s, {g, m, phi, *M}));
    }
  }
  const FatGraph t = theta_graph();
  const auto m = tautological_marking(t);
  std::vector<Dart> not_iso(6);
  std::iota(not_iso.begin(), not_iso.end(), 0);
  std::swap(not_iso[0], not_iso[1]);
  CHECK_THROWS_AS(equivariance_check({t, m, {0}}, {t, m, not_iso, IntMatrix::identity(2)}), Error);
}

TEST_CASE("cell sweeps") {
  const FatGraph t = theta_graph();
  const auto sweep = verify_cells(t, tautological_marking(t), 3);
  CHECK(sweep.ok());
  // genus one has no codimension-two cells
  CHECK(sweep.cells == 0);
  CHECK(sweep.equivariance_checks > 0);
  const FatGraph g = seed_spine(2);
  const auto s2 = verify_cells(g, tautological_marking(g), 2);
  CHECK(s2.ok());
  CHECK(s2.cells > 0);
}

TEST_CASE("move scripts") {
  std::ifstream in(TORELLI_DATA_DIR "/theta.mv");
  REQUIRE(in);
  const auto s = parse_mv(in);
  CHECK(s.moves == std::vector<Dart>{0, 1, 2, 0});
  std::istringstream bad("jump 3\n");
  CHECK_THROWS_AS(parse_mv(bad), Error);
}

TEST_CASE("cocycle errors") {
  const FatGraph t = theta_graph();
  auto m = tautological_marking(t);
  try {
    make_two_cell(t, m.values, m.omega);
    FAIL("trivalent graph accepted as a degeneration");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongDegeneracyType);
  }
  SimplicialChain ch;
  ch.dim = 4;
  ch.simplices.push_back({{0, 1, 2}, 1});
  try {
    cup_power_on_chain(ch);
    FAIL("unlabeled edge accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnlabeledEdge);
  }
  CHECK_THROWS_AS(cup_square_from_boundary({Wedge3(4), Wedge3(4)}, 0), Error);
}
