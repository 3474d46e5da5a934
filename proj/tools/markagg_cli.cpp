// markagg: command-line front end for Markov chain aggregation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "markagg.hpp"

namespace {

using namespace markagg;

struct Options {
  std::string matrix_path;
  std::string partition_path;
  std::string network_path;
  std::string out;
  std::string fixed_path;
  std::string fixed_predicate;
  std::string method = "aib";
  std::string criterion = "loss_x";
  std::string lifting = "p";
  std::string pi_path;
  double tol = kDefaultLumpTolerance;
  std::optional<double> lambda;
  std::size_t cap = 100000;
  std::size_t target_m = 0;
  std::size_t m_from = 0;
  std::size_t m_to = 1;
  bool emit_lifts = false;
  bool renormalize = false;
  bool fixed_mergeable = false;
};

MarkovChain load_chain(const Options& o) {
  const Matrix raw = io::read_file(o.matrix_path, [](std::istream& in) { return io::read_matrix(in); });
  return MarkovChain(validate_stochastic(raw, o.renormalize));
}

Partition load_partition(const Options& o, std::size_t n) {
  Partition g = io::read_file(o.partition_path, [](std::istream& in) { return io::read_partition(in); });
  if (g.n() != n)
    throw Error(Errc::kDimensionMismatch, "partition has " + std::to_string(g.n()) +
                                              " labels for a chain of " + std::to_string(n) + " states");
  return g;
}

std::optional<FixedClass> load_fixed(const Options& o) {
  if (o.fixed_path.empty()) return std::nullopt;
  return io::read_file(o.fixed_path, [](std::istream& in) { return io::read_fixed(in); });
}

Criterion parse_criterion(const std::string& s) {
  return s == "p_lift_kldr" ? Criterion::kPLiftKldr : Criterion::kLossX;
}

FixedMode fixed_mode(const Options& o) {
  return o.fixed_mergeable ? FixedMode::kMergeable : FixedMode::kFrozen;
}

// Writes to --out when given, otherwise to stdout.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(Errc::kParse, "cannot write '" + o.out + "'");
  f << text;
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::kParse, "cannot write '" + path + "'");
  io::write_matrix(f, m);
}

int cmd_stationary(const Options& o) {
  const Matrix raw = io::read_file(o.matrix_path, [](std::istream& in) { return io::read_matrix(in); });
  const Distribution mu = stationary_distribution(validate_stochastic(raw, o.renormalize), true);
  emit(o, io::format_vector(mu.values()) + "\n");
  return 0;
}

int cmd_evaluate(const Options& o) {
  const MarkovChain x = load_chain(o);
  const Partition g = load_partition(o, x.size());
  const MetricReport r = evaluate_partition(x, g, o.tol);
  const AggregatedChain y = aggregate(x, g);
  std::string text = format_report(r);
  text += "nu=" + io::format_vector(y.nu.values()) + "\n";
  text += "Q=";
  for (std::size_t k = 0; k < y.Q.size(); ++k) {
    if (k) text += ';';
    text += io::format_vector(y.Q.row(k));
  }
  text += "\n";
  if (o.emit_lifts) {
    const std::string prefix = o.out.empty() ? std::string("lift") : o.out;
    write_matrix_file(prefix + ".Q.txt", y.Q.matrix());
    write_matrix_file(prefix + ".plift.txt", p_lift(x, y, g).Phat.matrix());
    write_matrix_file(prefix + ".mulift.txt", pi_lift(y, g, x.mu()).Phat.matrix());
  }
  std::cout << text;
  return 0;
}

int cmd_lift(const Options& o) {
  const MarkovChain x = load_chain(o);
  const Partition g = load_partition(o, x.size());
  const AggregatedChain y = aggregate(x, g);
  LiftedChain lifted = [&] {
    if (o.lifting == "p") return p_lift(x, y, g);
    const Distribution pi =
        o.pi_path.empty() ? x.mu()
                          : io::read_file(o.pi_path, [](std::istream& in) { return io::read_distribution(in); });
    return pi_lift(y, g, pi);
  }();
  std::ostringstream s;
  io::write_matrix(s, lifted.Phat.matrix());
  emit(o, s.str());
  return 0;
}

int cmd_lumpcheck(const Options& o) {
  const Matrix raw = io::read_file(o.matrix_path, [](std::istream& in) { return io::read_matrix(in); });
  const StochasticMatrix p = validate_stochastic(raw, o.renormalize);
  const Partition g = load_partition(o, p.size());
  emit(o, format_lumpability(lumpability_check(p, g, o.tol)) + "\n");
  return 0;
}

int cmd_search(const Options& o) {
  const MarkovChain x = load_chain(o);
  const auto fixed = load_fixed(o);
  const Criterion crit = parse_criterion(o.criterion);
  SearchResult result;
  if (o.method == "aib") {
    result.best = aib_greedy(x, o.target_m, fixed, fixed_mode(o));
    result.value = criterion_value(x, result.best, crit);
  } else {
    result = exhaustive_search(x, o.target_m, crit, fixed);
  }
  std::ostringstream s;
  s << "# method=" << o.method << " criterion=" << o.criterion
    << " value=" << io::format_number(result.value, 17) << '\n';
  io::write_partition(s, result.best);
  emit(o, s.str());
  return 0;
}

int cmd_sweep(const Options& o) {
  const MarkovChain x = load_chain(o);
  const auto fixed = load_fixed(o);
  std::size_t from = o.m_from;
  if (from == 0) {
    from = x.size();
    if (fixed && o.method == "aib") from = aib_merge_chain(x, fixed, fixed_mode(o), x.size()).front().m();
    if (fixed && o.method != "aib") from = x.size() - normalize_fixed(*fixed, x.size()).states.size() + 1;
  }
  const auto records = sweep(x, from, o.m_to, o.method == "aib" ? SearchMethod::kAib : SearchMethod::kExhaustive,
                             fixed, fixed_mode(o), parse_criterion(o.criterion));
  emit(o, format_sweep_tsv(records));
  std::string minima;
  for (const auto& r : records)
    if (r.local_min) minima += (minima.empty() ? "" : ",") + std::to_string(r.m);
  std::cerr << "local_minima=" << minima << '\n';
  return 0;
}

int cmd_ctmc(const Options& o) {
  const ReactionNetwork net =
      io::read_file(o.network_path, [](std::istream& in) { return io::read_reaction_network(in); });
  const auto states = enumerate_reachable(net, o.cap);
  const Generator gen = build_generator(net, states);
  const Uniformized u = uniformize(gen, o.lambda);
  const std::string prefix = o.out.empty() ? std::string("ctmc") : o.out;
  write_matrix_file(prefix + ".matrix.txt", u.P.matrix());
  {
    std::ofstream f(prefix + ".legend.tsv");
    if (!f) throw Error(Errc::kParse, "cannot write legend");
    io::write_legend(f, net, gen.states);
  }
  std::cout << "states=" << gen.states.size() << '\n'
            << "lambda=" << io::format_number(u.lambda_used, 12) << '\n';
  if (!o.fixed_predicate.empty()) {
    const FixedClass f = select_states(gen.states, parse_predicate(net, o.fixed_predicate));
    std::ofstream out(prefix + ".fixed.txt");
    if (!out) throw Error(Errc::kParse, "cannot write fixed-class file");
    out << "# states satisfying " << o.fixed_predicate << '\n';
    io::write_fixed(out, f);
    std::cout << "fixed_states=" << f.states.size() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain state-space reduction by information-theoretic aggregation"};
  app.require_subcommand(1);
  Options o;

  auto positive = CLI::PositiveNumber;

  auto* stationary = app.add_subcommand("stationary", "print the stationary distribution");
  stationary->add_option("matrix", o.matrix_path, "transition matrix file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "metric report for a partition");
  evaluate->add_option("matrix", o.matrix_path)->required();
  evaluate->add_option("partition", o.partition_path)->required();
  evaluate->add_flag("--emit-lifts", o.emit_lifts, "write Q and both liftings to <out>.*.txt");

  auto* lift = app.add_subcommand("lift", "print a lifted transition matrix");
  lift->add_option("matrix", o.matrix_path)->required();
  lift->add_option("partition", o.partition_path)->required();
  lift->add_option("--lifting", o.lifting, "p or pi")->check(CLI::IsMember({"p", "pi"}));
  lift->add_option("--pi", o.pi_path, "distribution file for pi-lifting (default: stationary)");

  auto* lumpcheck = app.add_subcommand("lumpcheck", "strong lumpability test");
  lumpcheck->add_option("matrix", o.matrix_path)->required();
  lumpcheck->add_option("partition", o.partition_path)->required();

  auto* search = app.add_subcommand("search", "find an M-class partition");
  search->add_option("matrix", o.matrix_path)->required();
  search->add_option("-M,--classes", o.target_m, "number of classes")->required()->check(positive);

  auto* sweep_cmd = app.add_subcommand("sweep", "metric table over a range of M");
  sweep_cmd->add_option("matrix", o.matrix_path)->required();
  sweep_cmd->add_option("--from", o.m_from, "largest M (default: all reachable)");
  sweep_cmd->add_option("--to", o.m_to, "smallest M")->check(positive);

  auto* ctmc = app.add_subcommand("ctmc", "uniformized DTMC of a reaction network");
  ctmc->add_option("network", o.network_path)->required();
  ctmc->add_option("--lambda", o.lambda, "uniformization constant")->check(positive);
  ctmc->add_option("--cap", o.cap, "reachable-state cap")->check(positive);
  ctmc->add_option("--fixed-predicate", o.fixed_predicate, "e.g. gene-on or \"P>9\"");

  for (auto* sub : {stationary, evaluate, lift, lumpcheck, search, sweep_cmd, ctmc})
    sub->add_option("--out", o.out, "output path or prefix");
  for (auto* sub : {stationary, evaluate, lift, lumpcheck, search, sweep_cmd})
    sub->add_flag("--renormalize", o.renormalize, "divide each matrix row by its sum");
  for (auto* sub : {evaluate, lumpcheck})
    sub->add_option("--tol", o.tol, "lumpability tolerance")->check(positive);
  for (auto* sub : {search, sweep_cmd}) {
    sub->add_option("--method", o.method)->check(CLI::IsMember({"aib", "exhaustive"}));
    sub->add_option("--criterion", o.criterion)->check(CLI::IsMember({"loss_x", "p_lift_kldr"}));
    sub->add_option("--fixed", o.fixed_path, "file of 1-based states forming one class");
    sub->add_flag("--fixed-mergeable", o.fixed_mergeable, "let the fixed class merge further (aib)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*stationary) return cmd_stationary(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*lift) return cmd_lift(o);
    if (*lumpcheck) return cmd_lumpcheck(o);
    if (*search) return cmd_search(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*ctmc) return cmd_ctmc(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
