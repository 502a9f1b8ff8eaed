#include <catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <random>

#include "torelli/census.hpp"
#include "torelli/nilpotent.hpp"

using namespace torelli;

namespace {

using Poly = std::map<std::vector<int>, std::int64_t>;  // monomial (0-based letters) -> coefficient

Poly truncated_product(const Poly& a, const Poly& b, int K) {
  Poly r;
  for (const auto& [u, x] : a)
    for (const auto& [v, y] : b) {
      if (u.size() + v.size() > static_cast<std::size_t>(K)) continue;
      std::vector<int> w = u;
      w.insert(w.end(), v.begin(), v.end());
      r[w] += x * y;
    }
  return r;
}

// 1 + X_i, or 1 - X_i + X_i^2 - ... for the inverse
Poly letter_poly(int l, int K) {
  Poly p{{{}, 1}};
  const int i = std::abs(l) - 1;
  if (l > 0) p[{i}] = 1;
  else
    for (int d = 1; d <= K; ++d) p[std::vector<int>(d, i)] = d % 2 ? -1 : 1;
  return p;
}

Poly oracle_magnus(const FreeWord& w, int K) {
  Poly p{{{}, 1}};
  for (int l : w.letters()) p = truncated_product(p, letter_poly(l, K), K);
  return p;
}

bool matches(const MagnusSeries& s, const Poly& p, int n, int K) {
  for (int d = 0; d <= K; ++d)
    for (std::size_t idx = 0; idx < s.degree(d).size(); ++idx) {
      std::vector<int> w(d);
      std::size_t x = idx;
      for (int q = d - 1; q >= 0; --q) {
        w[q] = static_cast<int>(x % n);
        x /= n;
      }
      auto it = p.find(w);
      if (s.degree(d)[idx] != (it == p.end() ? 0 : it->second)) return false;
    }
  return true;
}

FreeWord random_word(std::mt19937_64& rng, int n, int maxlen) {
  FreeWord w;
  const int len = static_cast<int>(rng() % (maxlen + 1));
  for (int i = 0; i < len; ++i) {
    const int g = 1 + static_cast<int>(rng() % n);
    w.push(rng() % 2 ? g : -g);
  }
  return w;
}

bool brute_lyndon(const Word& w) {
  for (std::size_t r = 1; r < w.size(); ++r) {
    Word rot(w.begin() + r, w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + r);
    if (!(w < rot)) return false;
  }
  return true;
}

LieElement lie_sum(const LieElement& a, const LieElement& b) {
  LieElement r = a;
  r.coords = add(a.coords, b.coords);
  return r;
}

struct Loaded {
  FatGraph graph;
  std::vector<Dart> moves;
};

Loaded load_sequence(const std::string& mv) {
  std::ifstream fin(std::string(TORELLI_DATA_DIR) + "/genus2_base.fg");
  REQUIRE(fin);
  const auto f = parse_fg(fin);
  std::ifstream min(std::string(TORELLI_DATA_DIR) + "/" + mv);
  REQUIRE(min);
  return {f.graph, parse_mv(min).moves};
}

void check_vertex_sums(const NilpotentContext& ctx, const FatGraph& g, const LambdaResult& lr) {
  for (int v = 0; v < g.num_vertices(); ++v) {
    LieElement s = lr.values[g.vertex_darts(v).front()];
    for (std::size_t i = 1; i < g.vertex_darts(v).size(); ++i) s = lie_sum(s, lr.values[g.vertex_darts(v)[i]]);
    CHECK(surface_reduce(s, ctx.quotient()).is_zero());
  }
  for (Dart d = 0; d < g.num_darts(); ++d)
    CHECK(surface_reduce(lie_sum(lr.values[d], lr.values[g.iota(d)]), ctx.quotient()).is_zero());
}

}  // namespace

TEST_CASE("free words") {
  const FreeWord w = parse_word("x1 x2 X2 X1 x3");
  CHECK(format_word(w) == "x3");
  CHECK(format_word(FreeWord()) == "1");
  CHECK((w * w.inverse()).empty());
  CHECK(parse_word("X1 x2 x1").cyclically_reduced() == parse_word("x2"));
  CHECK(commutator(FreeWord::gen(1), FreeWord::gen(2)).abelianize(2) == IntVector{0, 0});
  CHECK_THROWS_AS(parse_word("y1"), Error);
  CHECK(generates_free_group({parse_word("x1 x2"), parse_word("x2")}, 2));
  CHECK_FALSE(generates_free_group({parse_word("x1 x1"), parse_word("x2")}, 2));
}

TEST_CASE("Magnus expansion agrees with direct expansion") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const FreeWord w = random_word(rng, 3, 10);
    CHECK(matches(magnus(w, 3, 4), oracle_magnus(w, 4), 3, 4));
  }
}

TEST_CASE("Magnus expansion is multiplicative") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const FreeWord a = random_word(rng, 4, 12), b = random_word(rng, 4, 12);
    CHECK(magnus(a * b, 4, 3) == magnus(a, 4, 3) * magnus(b, 4, 3));
  }
  for (int t = 0; t < 50; ++t) {
    const FreeWord a = random_word(rng, 4, 12);
    CHECK(magnus(a, 4, 3).inverse() == magnus(a.inverse(), 4, 3));
  }
}

TEST_CASE("lower central series membership") {
  const FreeWord c = commutator(FreeWord::gen(1), FreeWord::gen(2));
  CHECK(free_nilpotent_equal(c, FreeWord(), 1, 2));
  CHECK_FALSE(free_nilpotent_equal(c, FreeWord(), 2, 2));
  const FreeWord cc = commutator(FreeWord::gen(1), c);
  CHECK(free_nilpotent_equal(cc, FreeWord(), 2, 2));
  CHECK_FALSE(free_nilpotent_equal(cc, FreeWord(), 3, 2));
  LyndonBasis lb(2, 3);
  CHECK(leading_lie_term(lb, cc, 2) == lb.bracket(lb.generator(0), lb.bracket(lb.generator(0), lb.generator(1))));
  CHECK_THROWS_AS(leading_lie_term(lb, FreeWord::gen(1), 1), Error);
}

TEST_CASE("Lyndon words and Witt dimensions") {
  for (int n = 2; n <= 4; ++n)
    for (int d = 1; d <= (n == 4 ? 4 : 6); ++d) {
      std::size_t brute = 0;
      std::size_t total = 1;
      for (int i = 0; i < d; ++i) total *= n;
      for (std::size_t idx = 0; idx < total; ++idx) {
        Word w(d);
        std::size_t x = idx;
        for (int q = d - 1; q >= 0; --q) {
          w[q] = static_cast<int>(x % n);
          x /= n;
        }
        brute += brute_lyndon(w);
      }
      const auto words = lyndon_words(n, d);
      CHECK(words.size() == brute);
      CHECK(static_cast<std::int64_t>(brute) == witt_dimension(n, d));
      for (const auto& w : words) CHECK(is_lyndon(w));
    }
}

TEST_CASE("Lyndon coordinates invert the tensor embedding") {
  LyndonBasis lb(3, 4);
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 4; ++d)
    for (int t = 0; t < 10; ++t) {
      LieElement x{d, IntVector(lb.dimension(d), 0)};
      for (auto& c : x.coords) c = static_cast<std::int64_t>(rng() % 7) - 3;
      CHECK(lb.coordinates(lb.tensor(x), d) == x);
    }
  Tensor not_lie(9, 0);
  not_lie[0] = 1;  // X1 X1
  CHECK_THROWS_AS(lb.coordinates(not_lie, 2), Error);
}

TEST_CASE("surface quotient ranks") {
  for (int g = 1; g <= 2; ++g) {
    const int K = g == 1 ? 5 : 4;
    auto lb = std::make_shared<LyndonBasis>(2 * g, K);
    SurfaceQuotient q(lb, lb->standard_omega());
    for (int d = 2; d <= K; ++d) {
      CHECK(q.quotient_rank(d) == labute_dimension(g, d));
      CHECK(q.degree(d).torsion_free());
    }
  }
  CHECK(labute_dimension(2, 2) == 5);
  CHECK(labute_dimension(2, 3) == 16);
  CHECK(labute_dimension(2, 4) == 45);
}

TEST_CASE("surface reduction kills omega and its brackets") {
  const NilpotentContext ctx(4, 3, NilpotentContext::standard_relator(2));
  const auto& lb = ctx.basis();
  const LieElement om = lb.standard_omega();
  CHECK(ctx.quotient().omega() == om);
  CHECK(surface_reduce(om, ctx.quotient()).is_zero());
  for (int i = 0; i < 4; ++i) {
    CHECK(surface_reduce(lb.bracket(om, lb.generator(i)), ctx.quotient()).is_zero());
    CHECK(surface_reduce(lb.bracket(lb.generator(i), om), ctx.quotient()).is_zero());
  }
  CHECK_FALSE(surface_reduce(lb.bracket(lb.generator(0), lb.generator(1)), ctx.quotient()).is_zero());
}

TEST_CASE("boundary words") {
  const FatGraph t = theta_graph();
  const auto pm = tautological_pi_marking(t);
  LyndonBasis lb(2, 2);
  const LieElement om = lb.standard_omega();
  for (int start = 0; start < 4; ++start) {
    const FreeWord w = boundary_word(t, pm, start);
    CHECK(is_zero(w.abelianize(2)));
    const LieElement lead = leading_lie_term(lb, w, 1);
    CHECK((lead == om || lead.coords == negate(om.coords)));
    CHECK(conjugate_to_relator(w, pm.relator));
  }
  CensusOptions opt;
  opt.max_codim = 0;
  const auto db = enumerate_unmarked(2, opt);
  for (const auto* r : db.layer(0)) {
    const FatGraph g = graph_from_key(r->key);
    const auto p = tautological_pi_marking(g);
    CHECK(conjugate_to_relator(boundary_word(g, p), p.relator));
    CHECK(conjugate_to_relator(boundary_word(g, p, 3), p.relator));
  }
  CHECK_THROWS_AS(boundary_word(FatGraph::build({1, 2, 3, 0}, {1, 0, 3, 2}), PiMarking{}), Error);
}

TEST_CASE("surface group equality in N_k") {
  const FreeWord R = NilpotentContext::standard_relator(2);
  const NilpotentContext ctx(4, 3, R);
  const FreeWord x1 = FreeWord::gen(1), x2 = FreeWord::gen(2);
  for (int k = 1; k <= 3; ++k) {
    CHECK(surface_nilpotent_equal(ctx, R, FreeWord(), k));
    CHECK(surface_nilpotent_equal(ctx, x1 * R, x1, k));
    CHECK(surface_nilpotent_equal(ctx, x2 * R * x2.inverse(), FreeWord(), k));
  }
  CHECK_FALSE(surface_nilpotent_equal(ctx, x1, x2, 1));
  CHECK_FALSE(surface_nilpotent_equal(ctx, commutator(x1, x2), FreeWord(), 2));
  CHECK(surface_nilpotent_equal(ctx, commutator(x1, x2), FreeWord(), 1));
  // [x1,x2] = [x4,x3] in the surface group
  CHECK(surface_nilpotent_equal(ctx, commutator(x1, x2), commutator(FreeWord::gen(4), FreeWord::gen(3)), 3));
  CHECK_THROWS_AS(nk_coordinates(ctx, ctx.series(x1), 4), Error);
}

TEST_CASE("N_k markings are preserved by moves") {
  const FatGraph g = seed_spine(2);
  const auto pm = tautological_pi_marking(g);
  const NilpotentContext ctx(4, 3, pm.relator);
  auto nk = to_nk_marking(ctx, pm);
  CHECK_FALSE(nk_marking_violation(ctx, g, nk, 3));
  FatGraph cur = g;
  std::mt19937_64 rng(8);
  for (int s = 0; s < 10; ++s) {
    const auto es = cur.edges();
    const auto mr = whitehead_move(cur, es[rng() % es.size()]);
    nk = apply_move_nk(nk, mr);
    cur = mr.graph;
    CHECK_FALSE(nk_marking_violation(ctx, cur, nk, 3));
  }
}

TEST_CASE("lambda on a Torelli sequence with nonzero j") {
  const auto [g, moves] = load_sequence("genus2_torelli.mv");
  const auto pm = tautological_pi_marking(g);
  const NilpotentContext ctx(4, 3, pm.relator);
  const auto l1 = lambda_k(ctx, g, pm, moves, 1);
  bool nonzero = false;
  for (const auto& v : l1.values) nonzero = nonzero || !v.is_zero();
  CHECK(nonzero);
  check_vertex_sums(ctx, g, l1);
  CHECK_FALSE(preserves_nk(ctx, g, pm, moves, 2));
  try {
    lambda_k(ctx, g, pm, moves, 2);
    FAIL("lambda_2 defined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNkTrivial);
  }
  const auto m = tautological_marking(g);
  CHECK(j_path({g, m, moves}) == -6 * wedge3({1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}));
}

TEST_CASE("lambda on a Torelli sequence with zero j") {
  const auto [g, moves] = load_sequence("genus2_kernel.mv");
  const auto pm = tautological_pi_marking(g);
  const NilpotentContext ctx(4, 3, pm.relator);
  CHECK(j_path({g, tautological_marking(g), moves}).is_zero());
  const auto l1 = lambda_k(ctx, g, pm, moves, 1);
  check_vertex_sums(ctx, g, l1);
  if (preserves_nk(ctx, g, pm, moves, 2)) check_vertex_sums(ctx, g, lambda_k(ctx, g, pm, moves, 2));
}
