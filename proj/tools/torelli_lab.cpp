// torelli_lab: command-line front end.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "torelli/torelli.hpp"

using namespace torelli;

namespace {

// Verification failures exit 1, input problems exit 2.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::IdentityFailure:
    case ErrorCode::NotNkTrivial:
    case ErrorCode::OpenBoundary:
    case ErrorCode::InvalidMarking:
    case ErrorCode::RankDropModN:
      return 1;
    default:
      return 2;
  }
}

FgFile read_fg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  return parse_fg(in);
}

MoveScript read_mv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  return parse_mv(in);
}

// hmark lines if present (omega line or the cycle-basis form), otherwise
// the tautological marking.
HomologyMarking marking_of(const FgFile& f) {
  const FatGraph& g = f.graph;
  if (!g.is_spine()) throw Error(ErrorCode::NotSpine, "graph has more than one boundary cycle");
  IntMatrix om;
  if (auto o = parse_omega(f.extra)) om = *o;
  else om = intersection_form(g, cycle_basis(g));
  if (auto m = parse_hmarks(g, f.extra, om)) {
    check_marking(g, *m);
    return *m;
  }
  auto cb = cycle_basis(g);
  return tautological_marking(g, cb, om);
}

PiMarking pi_marking_of(const FgFile& f) {
  const FatGraph& g = f.graph;
  if (auto pm = parse_pimarks(g, f.extra, 2 * g.genus())) {
    if (auto why = pi_marking_violation(g, *pm)) throw Error(ErrorCode::InvalidMarking, *why);
    return *pm;
  }
  return tautological_pi_marking(g);
}

std::string letter_wedge(const Wedge3& w) {
  if (w.is_zero()) return "0";
  std::string s;
  for (const auto& [t, c] : w.terms()) {
    std::string name;
    for (int i = 0; i < 3; ++i) {
      if (i) name += "∧";
      name += w.dim() <= 26 ? std::string(1, static_cast<char>('a' + t[i])) : "x" + std::to_string(t[i] + 1);
    }
    if (!s.empty()) s += c < 0 ? " - " : " + ";
    else if (c < 0) s += "-";
    const auto a = c < 0 ? -c : c;
    s += (a == 1 ? "" : std::to_string(a) + "·") + name;
  }
  return s;
}

// Cell ids index codim2_edge_pairs of the trivalent graph.
TwoCell cell_of(const FatGraph& g, const HomologyMarking& m, int id) {
  const auto pairs = codim2_edge_pairs(g);
  if (id < 0 || id >= static_cast<int>(pairs.size()))
    throw Error(ErrorCode::InvalidArgument, "cell id out of range (graph has " + std::to_string(pairs.size()) + " cells)");
  return two_cell_at(g, m, pairs[id].first, pairs[id].second);
}

PairingGraph pairing_graph_of(const std::string& spec) {
  if (spec == "theta") return theta_pairing_graph();
  if (spec == "twoloop") return two_loop_graph();
  std::ifstream in(spec);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + spec);
  return parse_pairing_graph(in);
}

MoveSequence sequence_of(const FgFile& f, const MoveScript& s) { return {f.graph, marking_of(f), s.moves}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fat graphs, Torelli groups and the Johnson cocycle"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "human-readable summaries");
  std::string format = "text";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text"}));

  std::string fg_path, mv_path, graph_spec = "theta", output, checkpoint;
  int cell_id = 0, apex = 0, radius = 2, k = 1, genus = 1, max_codim = 2, jobs = 1;
  std::int64_t level = 0;
  std::uint64_t seed = 0;
  bool pi = false;

  auto* validate = app.add_subcommand("validate", "check a .fg file and its markings");
  validate->add_option("fg", fg_path)->required();

  auto* taut = app.add_subcommand("taut-mark", "tautological marking");
  taut->add_option("fg", fg_path)->required();
  taut->add_flag("--pi", pi, "fundamental-group marking");

  auto* move = app.add_subcommand("move", "apply a move script");
  move->add_option("fg", fg_path)->required();
  move->add_option("mv", mv_path)->required();

  auto* jpath = app.add_subcommand("j-path", "sum of j along a move script");
  jpath->add_option("fg", fg_path)->required();
  jpath->add_option("mv", mv_path)->required();

  auto* cells = app.add_subcommand("verify-cells", "cocycle check on all codim-2 cells near the graph");
  cells->add_option("fg", fg_path)->required();
  cells->add_option("--radius", radius)->check(CLI::NonNegativeNumber);

  auto* cup2 = app.add_subcommand("cup2", "cup square on a 2-cell");
  cup2->add_option("fg", fg_path)->required();
  cup2->add_option("cell", cell_id)->required();
  cup2->add_option("--apex", apex);

  auto* contract = app.add_subcommand("contract", "contraction of the cup square");
  contract->add_option("fg", fg_path)->required();
  contract->add_option("cell", cell_id)->required();
  contract->add_option("--graph", graph_spec);
  contract->add_option("--apex", apex);

  auto* nred = app.add_subcommand("nilpotent-reduce", "N_k coordinates of the pi_1 marking");
  nred->add_option("fg", fg_path)->required();
  nred->add_option("--k", k)->required()->check(CLI::Range(1, 8));

  auto* lambda = app.add_subcommand("lambda", "lambda_k of a move script");
  lambda->add_option("--k", k)->required()->check(CLI::Range(1, 7));
  lambda->add_option("fg", fg_path)->required();
  lambda->add_option("mv", mv_path)->required();

  auto* census = app.add_subcommand("census", "orbit census");
  census->add_option("--g", genus)->required()->check(CLI::Range(1, 3));
  census->add_option("--levelN", level)->check(CLI::Range(2, 64));
  census->add_option("--max-codim", max_codim)->check(CLI::NonNegativeNumber);
  census->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  census->add_option("--seed", seed);
  census->add_option("--output", output);
  census->add_option("--checkpoint", checkpoint);

  auto* corpus = app.add_subcommand("identity-corpus", "torus bounding pair identities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      const FgFile f = read_fg(fg_path);
      const FatGraph& g = f.graph;
      std::cout << "vertices " << g.num_vertices() << "\nedges " << g.num_edges() << "\nboundaries "
                << g.num_boundaries() << "\ngenus " << g.genus() << "\ntrivalent " << g.is_trivalent() << '\n';
      if (g.is_spine()) {
        std::cout << "codim " << g.codimension() << '\n';
        if (g.is_trivalent()) marking_of(f);
        pi_marking_of(f);
        std::cout << "marking ok\n";
      }
      return 0;
    }
    if (*taut) {
      const FgFile f = read_fg(fg_path);
      const FatGraph& g = f.graph;
      if (!g.is_spine()) throw Error(ErrorCode::NotSpine, "graph has more than one boundary cycle");
      std::cout << format_fg(g, f.labels);
      if (pi) {
        std::cout << format_pimarks(g, tautological_pi_marking(g));
      } else {
        auto m = tautological_marking(g);
        std::cout << format_omega(m.omega) << format_hmarks(g, m);
      }
      return 0;
    }
    if (*move) {
      const FgFile f = read_fg(fg_path);
      const MoveScript s = read_mv(mv_path);
      HomologyMarking m = marking_of(f);
      FatGraph g = f.graph;
      for (Dart e : s.moves) {
        auto mr = whitehead_move(g, e);
        m = apply_move(m, mr);
        g = std::move(mr.graph);
      }
      check_marking(g, m);
      std::cout << format_fg(g, f.labels) << format_omega(m.omega) << format_hmarks(g, m);
      return 0;
    }
    if (*jpath) {
      const FgFile f = read_fg(fg_path);
      const MoveSequence s = sequence_of(f, read_mv(mv_path));
      const Wedge3 total = j_path(s);
      if (pretty) {
        int i = 0;
        for (const auto& w : j_steps(s)) std::cout << "step " << ++i << ": " << letter_wedge(w) << '\n';
        std::cout << "total: " << letter_wedge(total) << '\n';
      } else {
        std::cout << format_wedge3(total);
      }
      return 0;
    }
    if (*cells) {
      const FgFile f = read_fg(fg_path);
      const auto sweep = verify_cells(f.graph, marking_of(f), radius);
      std::cout << "states " << sweep.states << "\ncells " << sweep.cells << "\nnonzero_residuals " << sweep.failures
                << "\nequivariance_checks " << sweep.equivariance_checks << "\nequivariance_failures "
                << sweep.equivariance_failures << '\n';
      return sweep.failures == 0 && sweep.equivariance_failures == 0 ? 0 : 1;
    }
    if (*cup2 || *contract) {
      const FgFile f = read_fg(fg_path);
      const HomologyMarking m = marking_of(f);
      const TwoCell c = cell_of(f.graph, m, cell_id);
      if (apex < 0 || apex >= c.size()) throw Error(ErrorCode::InvalidArgument, "apex out of range");
      const auto jv = boundary_values(c);
      const MultiWedge x = cup_square_from_boundary(jv, apex);
      for (int a = 0; a < c.size(); ++a)
        if (cup_square_from_boundary(jv, a) != x) throw VerificationFailure("cup square depends on the apex");
      if (*cup2) {
        if (pretty) std::cout << (c.kind == TwoCellKind::Pentagon ? "pentagon" : "square") << " cell, apex " << apex << '\n';
        std::cout << format_multiwedge(x);
      } else {
        std::cout << "contract " << contract_graph(pairing_graph_of(graph_spec), x, m.omega) << '\n';
      }
      return 0;
    }
    if (*nred) {
      const FgFile f = read_fg(fg_path);
      const PiMarking pm = pi_marking_of(f);
      NilpotentContext ctx(pm.rank, std::max(2, k), pm.relator);
      sync_quotient_cache(ctx.quotient(), "g" + std::to_string(pm.rank / 2) + "_K" + std::to_string(ctx.truncation()));
      const auto res = residual_nk(ctx, pm, k);
      for (Dart e : f.graph.edges()) std::cout << "edge " << e << '\n' << format_nk(res[e]);
      if (auto why = nk_marking_violation(ctx, f.graph, to_nk_marking(ctx, pm), k)) throw VerificationFailure(*why);
      return 0;
    }
    if (*lambda) {
      const FgFile f = read_fg(fg_path);
      const MoveScript s = read_mv(mv_path);
      const PiMarking pm = pi_marking_of(f);
      NilpotentContext ctx(pm.rank, k + 1, pm.relator);
      const auto res = lambda_k(ctx, f.graph, pm, s.moves, k);
      for (Dart e : f.graph.edges()) std::cout << "edge " << e << " -> " << res.correspondence[e] << '\n' << format_lie(res.values[e]);
      return 0;
    }
    if (*census) {
      CensusOptions opt;
      opt.max_codim = max_codim;
      opt.seed = seed;
      opt.jobs = jobs;
      opt.checkpoint = checkpoint;
      const OrbitDatabase db = level ? enumerate_levelN(genus, level, opt) : enumerate_unmarked(genus, opt);
      const std::string text = format_database(db);
      if (!output.empty()) {
        std::ofstream os(output);
        if (!os) throw Error(ErrorCode::Parse, "cannot write " + output);
        os << text;
      } else if (!pretty) {
        std::cout << text;
      }
      if (pretty) {
        for (int c = 0; c <= db.max_codim; ++c) std::cout << "codim " << c << ": " << db.count(c) << " orbits\n";
        if (is_complete(db)) std::cout << "orbifold Euler characteristic " << format_rational(orbifold_euler(db)) << '\n';
      }
      return 0;
    }
    if (*corpus) {
      const auto rep = verify_identity_corpus();
      for (std::size_t i = 0; i < rep.names.size(); ++i)
        std::cout << "expression " << rep.names[i] << ": " << letter_wedge(rep.basis_values[i]) << '\n';
      std::cout << "total: " << letter_wedge(rep.total) << "\nrandom points: " << rep.random_points << '\n';
      return 0;
    }
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
