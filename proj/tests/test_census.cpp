#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "torelli/census.hpp"

using namespace torelli;

namespace {

CensusOptions upto(int c, std::uint64_t seed = 0, int jobs = 1) {
  CensusOptions o;
  o.max_codim = c;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

std::vector<std::size_t> counts(const OrbitDatabase& db) {
  std::vector<std::size_t> out;
  for (int c = 0; c <= db.max_codim; ++c) out.push_back(db.count(c));
  return out;
}

std::set<std::string> keys(const OrbitDatabase& db) {
  std::set<std::string> out;
  for (const auto& [k, r] : db.records) out.insert(k);
  return out;
}

// |Sp(2, Z/N)| = |SL(2, Z/N)| by exhaustion
long long brute_sl2(int N) {
  long long n = 0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) n += ((a * d - b * c) % N + N) % N == 1;
  return n;
}

}  // namespace

TEST_CASE("unmarked counts") {
  const auto g1 = enumerate_unmarked(1, upto(5));
  CHECK(counts(g1) == std::vector<std::size_t>{1, 1});
  CHECK(orbifold_euler(g1) == Rational(-1, 12));
  const auto g2 = enumerate_unmarked(2, upto(9));
  CHECK(counts(g2) == std::vector<std::size_t>{9, 29, 52, 45, 21, 4});
  CHECK(orbifold_euler(g2) == Rational(1, 120));
  CHECK(format_rational(orbifold_euler(g1)) == "-1/12");
}

TEST_CASE("level N counts") {
  const auto l2 = enumerate_levelN(1, 2, upto(1));
  CHECK(counts(l2) == std::vector<std::size_t>{2, 3});
  const auto l3 = enumerate_levelN(1, 3, upto(1));
  CHECK(counts(l3) == std::vector<std::size_t>{4, 6});
  CHECK(orbifold_euler(l2) == Rational(-1, 2));
  CHECK(orbifold_euler(l3) == Rational(-2));
  // Euler characteristic scales by the index of the level subgroup
  const Rational chi = orbifold_euler(enumerate_unmarked(1, upto(1)));
  CHECK(orbifold_euler(l2) == chi * Rational(symplectic_group_order(1, 2)));
  CHECK(orbifold_euler(l3) == chi * Rational(symplectic_group_order(1, 3)));
}

TEST_CASE("counts do not depend on the seed or job count") {
  for (int g = 1; g <= 2; ++g) {
    const auto base = keys(enumerate_unmarked(g, upto(5)));
    for (std::uint64_t s : {1u, 7u, 42u}) CHECK(keys(enumerate_unmarked(g, upto(5, s))) == base);
    CHECK(keys(enumerate_unmarked(g, upto(5, 0, 4))) == base);
  }
  for (std::int64_t N : {2, 3}) {
    const auto base = keys(enumerate_levelN(1, N, upto(1)));
    for (std::uint64_t s : {3u, 9u}) CHECK(keys(enumerate_levelN(1, N, upto(1, s))) == base);
  }
  const auto b2 = keys(enumerate_levelN(2, 2, upto(0)));
  CHECK(keys(enumerate_levelN(2, 2, upto(0, 5, 4))) == b2);
}

TEST_CASE("symplectic group orders") {
  for (int N = 2; N <= 6; ++N) CHECK(symplectic_group_order(1, N) == brute_sl2(N));
  CHECK(symplectic_group_order(2, 2) == 720);
  CHECK(symplectic_group_order(2, 3) == 51840);
  CHECK_THROWS_AS(symplectic_group_order(1, 1), Error);
}

TEST_CASE("level N censuses are closed under Sp and cover the unmarked census") {
  for (auto [g, N] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {1, 4}, {2, 2}}) {
    const auto db = enumerate_levelN(g, N, upto(g == 1 ? 1 : 0));
    CHECK(closed_under_symplectic(db, 0));
    if (g == 1) CHECK(closed_under_symplectic(db, 1));
    // orbit-stabilizer: level-N markings of one graph form an Sp(2g, Z/N) torsor
    std::map<std::string, BigInt> cover;
    std::map<std::string, int> orbits;
    for (const auto* r : db.layer(0)) {
      const std::string u = unmarked_key(r->key);
      const int aut = canonical_form(graph_from_key(u)).automorphisms;
      REQUIRE(aut % r->automorphisms == 0);
      cover[u] += aut / r->automorphisms;
      ++orbits[u];
    }
    CHECK(cover.size() == enumerate_unmarked(g, upto(0)).count(0));
    for (const auto& [u, n] : cover) CHECK(n == symplectic_group_order(g, N));
    for (const auto& [u, n] : orbits) CHECK(symplectic_group_order(g, N) % n == 0);
  }
}

TEST_CASE("incidences") {
  const auto db = enumerate_unmarked(2, upto(5));
  for (const auto& [k, r] : db.records) {
    std::map<int, int> by_codim;
    for (const auto& n : r.neighbors) {
      const auto* nr = db.find(n);
      REQUIRE(nr);
      ++by_codim[nr->codim];
      // symmetric incidence
      CHECK(std::count(nr->neighbors.begin(), nr->neighbors.end(), k) > 0);
    }
    if (r.codim == 1) CHECK(by_codim[0] == 2);
    if (r.codim == 2) {
      const FatGraph g = graph_from_key(k);
      int high = 0;
      for (int v = 0; v < g.num_vertices(); ++v) high += g.valence(v) > 3;
      CHECK(by_codim[1] == (high == 1 ? 5 : 4));
    }
    CHECK(r.automorphisms == canonical_form(graph_from_key(k)).automorphisms);
  }
}

TEST_CASE("presentation") {
  const auto db = enumerate_unmarked(2, upto(2));
  const auto rep = extract_presentation(db, {"johnson"});
  CHECK(rep.generators.size() == 29);
  CHECK(rep.count(RelationKind::Involutivity) == rep.generators.size());
  CHECK(rep.count(RelationKind::Pentagon) + rep.count(RelationKind::Commutativity) == 52);
  for (const auto& rel : rep.relations) {
    if (rel.kind == RelationKind::Pentagon) CHECK(rel.generators.size() == 5);
    if (rel.kind == RelationKind::Commutativity) {
      CHECK(rel.generators.size() == 4);
      REQUIRE(rel.supports.size() == 2);
      CHECK(rel.supports[0].size() == 2);
      CHECK(rel.supports[1].size() == 2);
    }
  }
  CHECK(rep.opaque_generators == std::vector<std::string>{"johnson"});
  CHECK(to_string(RelationKind::Pentagon) == "pentagon");
  try {
    extract_presentation(enumerate_unmarked(2, upto(1)));
    FAIL("presentation from codim 1");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteCensus);
  }
}

TEST_CASE("incomplete censuses") {
  try {
    orbifold_euler(OrbitDatabase{});
    FAIL("empty census accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteCensus);
  }
  const auto partial = enumerate_unmarked(2, upto(3));
  CHECK_FALSE(is_complete(partial));
  CHECK_THROWS_AS(orbifold_euler(partial), Error);
  CHECK_THROWS_AS(enumerate_levelN(1, 1), Error);
  CHECK_THROWS_AS(enumerate_unmarked(0), Error);
}

TEST_CASE("database text round trip") {
  const auto db = enumerate_levelN(1, 3, upto(1));
  std::istringstream in(format_database(db));
  const auto back = parse_database(in);
  CHECK(back.genus == 1);
  CHECK(back.type == CensusType::LevelN);
  CHECK(back.modulus == 3);
  CHECK(back.max_codim == 1);
  CHECK(back.completed_codim == 1);
  CHECK(back.records == db.records);
  OrbitDatabase d = back;
  const auto r = d.records.begin()->second;
  CHECK_NOTHROW(d.insert(r));
  auto conflict = r;
  conflict.automorphisms += 1;
  CHECK_THROWS_AS(d.insert(conflict), Error);
  std::istringstream bad("census g=1 type=weird\n");
  CHECK_THROWS_AS(parse_database(bad), Error);
}

TEST_CASE("checkpoint resume reproduces the census") {
  const auto path = std::filesystem::temp_directory_path() / "torelli_ckpt_test.txt";
  std::filesystem::remove(path);
  CensusOptions o = upto(2);
  o.checkpoint = path.string();
  const auto first = enumerate_unmarked(2, o);
  o.max_codim = 5;
  const auto resumed = enumerate_unmarked(2, o);
  const auto direct = enumerate_unmarked(2, upto(5));
  CHECK(resumed.records == direct.records);
  std::ifstream in(path);
  const auto on_disk = parse_database(in);
  CHECK(on_disk.records == direct.records);
  CHECK(on_disk.completed_codim == 5);
  CHECK(first.count(2) == 52);
  std::filesystem::remove(path);
}

TEST_CASE("Torelli words") {
  const auto g1 = enumerate_unmarked(1, upto(0));
  for (const auto& s : torelli_word_search(g1)) {
    const auto end = s.end();
    CHECK(canonical_form(end.graph, detail::marking_labels(end.marking)).key() ==
          canonical_form(s.start, detail::marking_labels(s.marking)).key());
    CHECK(j_path(s).is_zero());
  }
  TorelliSearchOptions opt;
  opt.max_loops = 4;
  opt.max_words = 400;
  const auto words = torelli_word_search(enumerate_unmarked(2, upto(0)), opt);
  CHECK(words.size() == 400);
  int nonzero = 0;
  for (const auto& s : words) {
    const auto end = s.end();
    CHECK(canonical_form(end.graph, detail::marking_labels(end.marking)).key() ==
          canonical_form(s.start, detail::marking_labels(s.marking)).key());
    const Wedge3 j = j_path(s);
    CHECK(j.content() % 6 == 0);
    nonzero += !j.is_zero();
  }
  CHECK(nonzero > 0);
}

TEST_CASE("labeled moves commute with canonical forms") {
  const FatGraph g = seed_spine(2);
  const auto m = tautological_marking(g);
  LabeledGraph lg{g, detail::marking_labels(m), 0};
  for (Dart e : g.edges()) {
    const auto mr = whitehead_move(g, e);
    const auto moved = apply_move(m, mr);
    CHECK(labeled_move(lg, e).key() == canonical_form(mr.graph, detail::marking_labels(moved)).key());
  }
  CHECK(codimension_of(2, 18) == 0);
  CHECK(top_codimension(3) == 9);
}
