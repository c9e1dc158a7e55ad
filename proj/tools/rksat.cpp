// rksat: classification, marking, coupling trees and approximate counting
// for random k-CNF formulas.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rksat/config.hpp"
#include "rksat/report.hpp"

using namespace rksat;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInput = 3, kRegime = 4, kResource = 5, kInternal = 70 };

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Usage: return kUsage;
    case ErrorCategory::Input: return kInput;
    case ErrorCategory::Regime: return kRegime;
    case ErrorCategory::Resource: return kResource;
    case ErrorCategory::Internal: return kInternal;
  }
  return kInternal;
}

// Raw flag values; only the ones given on the command line override the config file.
struct Flags {
  std::string input;
  std::string config_file;
  bool dump_config = false;
  std::optional<int> k;
  std::optional<Var> n;
  std::optional<std::size_t> m;
  std::optional<std::string> alpha, eps, delta, L, s, bad_fraction, bisect, lp, format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> c0, node_cap, component_cap, enumeration_cap, lp_size_cap, marking_retries, threads;
};

void add_common(CLI::App* sub, Flags& f, bool with_input = true) {
  if (with_input) sub->add_option("input", f.input, "DIMACS file ('-' for stdin); omit to generate from -k/-n/-m|--alpha");
  sub->add_option("--config", f.config_file, "JSON run config; flags override it")->check(CLI::ExistingFile);
  sub->add_flag("--dump-config", f.dump_config, "print the effective config as JSON and exit");
  sub->add_option("-k", f.k, "clause width");
  sub->add_option("-n", f.n, "number of variables");
  sub->add_option("-m", f.m, "number of clauses");
  sub->add_option("--alpha", f.alpha, "density; m = floor(alpha n)");
  sub->add_option("--seed", f.seed, "seed for generation and randomized search")->envname("RKSAT_SEED");
  sub->add_option("--eps", f.eps, "accuracy (rational)");
  sub->add_option("--delta", f.delta, "high-degree threshold: integer | default | paper");
  sub->add_option("--L", f.L, "truncation depth: integer | infinite | paper");
  sub->add_option("--C0", f.c0, "constant in the paper truncation depth");
  sub->add_option("--s", f.s, "damping: rational | paper-capped | paper");
  sub->add_option("--bad-fraction", f.bad_fraction, "bad-clause threshold as a fraction of k");
  sub->add_option("--bisect", f.bisect, "geometric | paper");
  sub->add_option("--lp", f.lp, "exact | float");
  sub->add_option("--node-cap", f.node_cap, "coupling tree node cap");
  sub->add_option("--component-cap", f.component_cap, "largest component counted by enumeration");
  sub->add_option("--enumeration-cap", f.enumeration_cap, "largest V_I \\ V_set enumerated for r");
  sub->add_option("--lp-size-cap", f.lp_size_cap, "largest LP handed to the dense simplex");
  sub->add_option("--marking-retries", f.marking_retries, "marking seeds tried before giving up");
  sub->add_option("--format", f.format, "text | json");
  sub->add_option("--threads", f.threads, "worker threads (output does not depend on it)");
}

RunConfig build_config(const Flags& f) {
  RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, "cannot read config " + f.config_file + ": " + e.what());
    }
    c = config_from_json(j);
  }
  if (f.k) c.k = f.k;
  if (f.n) c.n = f.n;
  if (f.m) c.m = f.m;
  if (f.alpha) c.alpha = parse_rational(*f.alpha);
  if (f.seed) c.seed = *f.seed;
  if (f.eps) c.eps = parse_rational(*f.eps);
  if (f.delta) c.delta = *f.delta;
  if (f.L) c.L = *f.L;
  if (f.c0) c.c0 = *f.c0;
  if (f.s) c.s = *f.s;
  if (f.bad_fraction) c.bad_fraction = parse_rational(*f.bad_fraction);
  if (f.bisect) c.bisect = *f.bisect;
  if (f.lp) c.lp = *f.lp;
  if (f.node_cap) c.node_cap = *f.node_cap;
  if (f.component_cap) c.component_cap = *f.component_cap;
  if (f.enumeration_cap) c.enumeration_cap = *f.enumeration_cap;
  if (f.lp_size_cap) c.lp_size_cap = *f.lp_size_cap;
  if (f.marking_retries) c.marking_retries = *f.marking_retries;
  if (f.format) c.format = *f.format;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

Formula generate(const RunConfig& c) {
  const auto m = c.clause_count();
  if (!c.k || !c.n || !m) throw Error(ErrorKind::InvalidArgument, "generation needs -k, -n and -m or --alpha");
  return generate_random_formula(*c.k, *c.n, *m, c.seed);
}

Formula load(const Flags& f, const RunConfig& c) {
  if (f.input.empty()) return generate(c);
  std::string text;
  if (f.input == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(f.input);
    if (!in) throw Error(ErrorKind::UnreadableInput, "cannot open " + f.input);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return parse_dimacs(text);
}

std::string csv(const std::vector<std::uint32_t>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? " " : "") << xs[i];
  return out.str();
}

void print_notes(std::ostream& out, const ResolvedConstants& rc) {
  out << "Delta " << rc.delta << "  L " << (rc.L ? std::to_string(*rc.L) : "infinite") << "  s "
      << to_decimal(rc.s, 6) << '\n';
  for (const auto& note : rc.notes) out << "note: " << note << '\n';
}

void print_violations(std::ostream& out, const std::string& what, const std::vector<std::string>& v) {
  out << what << ": " << (v.empty() ? "ok" : std::to_string(v.size()) + " violation(s)") << '\n';
  for (const auto& line : v) out << "  " << line << '\n';
}

// Pivot index into Lambda*'s order from --step or --pivot.
std::size_t pick_step(const LambdaStar& lambda, std::optional<std::size_t> step, std::optional<Var> pivot) {
  if (lambda.order.empty()) throw Error(ErrorKind::InvalidArgument, "Lambda* is empty: no pivot to expand");
  if (pivot) {
    for (std::size_t i = 0; i < lambda.order.size(); ++i)
      if (lambda.order[i] == *pivot) return i;
    throw Error(ErrorKind::InvalidArgument, "variable " + std::to_string(*pivot) + " is not assigned by Lambda*");
  }
  const std::size_t i = step.value_or(0);
  if (i >= lambda.order.size())
    throw Error(ErrorKind::InvalidArgument, "step " + std::to_string(i) + " out of range 0.." +
                                                std::to_string(lambda.order.size() - 1));
  return i;
}

struct Context {
  Flags flags;
  RunConfig config;
  Formula formula;
  ResolvedConstants constants;
  json report;
  bool text = true;
};

Context open_context(const Flags& flags, const std::string& command) {
  Context ctx;
  ctx.flags = flags;
  ctx.config = build_config(flags);
  ctx.formula = load(flags, ctx.config);
  ctx.constants = resolve_constants(ctx.config, ctx.formula.k, ctx.formula.n);
  ctx.report = report_envelope(command, ctx.config);
  ctx.report["formula"] = formula_json(ctx.formula);
  ctx.report["constants"] = constants_json(ctx.constants);
  ctx.text = ctx.config.format == "text";
  return ctx;
}

void header(const Context& ctx) {
  std::cout << "formula: k=" << ctx.formula.k << " n=" << ctx.formula.n << " m=" << ctx.formula.m()
            << "  config " << ctx.report["config_hash"].get<std::string>() << '\n';
  print_notes(std::cout, ctx.constants);
}

void emit(const Context& ctx) {
  if (!ctx.text) std::cout << ctx.report.dump(2) << '\n';
}

int cmd_gen(const Flags& flags, const std::string& output) {
  const RunConfig config = build_config(flags);
  const Formula formula = generate(config);
  const std::string dimacs = write_dimacs(formula);
  if (output.empty()) {
    std::cout << dimacs;
    return kOk;
  }
  std::ofstream out(output);
  if (!out) throw Error(ErrorKind::UnreadableInput, "cannot write " + output);
  out << dimacs;
  json report = report_envelope("gen", config);
  report["formula"] = formula_json(formula);
  report["output"] = output;
  if (config.format == "json") std::cout << report.dump(2) << '\n';
  else std::cout << "wrote " << output << ": k=" << formula.k << " n=" << formula.n << " m=" << formula.m() << '\n';
  return kOk;
}

int cmd_classify(const Flags& flags) {
  auto ctx = open_context(flags, "classify");
  const auto cls = classify(ctx.formula, ctx.constants.delta, ctx.config.bad_fraction);
  const bool fixed = is_fixed_point(ctx.formula, cls);
  const auto separation = check_separation(ctx.formula, cls);
  AuditOptions options;
  options.seed = ctx.config.seed;
  ctx.report["classification"] = classification_json(cls);
  ctx.report["checks"] = {{"fixed_point", fixed}, {"separation", separation}};
  ctx.report["audit"] = audit_json(audit(ctx.formula, cls, options));
  if (ctx.text) {
    header(ctx);
    std::cout << "high-degree: " << csv(cls.high_degree) << '\n'
              << "bad variables (" << cls.bad_vars.size() << "): " << csv(cls.bad_vars) << '\n'
              << "bad clauses (" << cls.bad_clauses.size() << "): " << csv(cls.bad_clauses) << '\n'
              << "good variables: " << cls.good_vars.size() << "  good clauses: " << cls.good_clauses.size()
              << "  rounds: " << cls.rounds << '\n'
              << "fixed point: " << (fixed ? "yes" : "NO") << '\n';
    print_violations(std::cout, "separation", separation);
  }
  emit(ctx);
  return kOk;
}

int cmd_mark(const Flags& flags) {
  auto ctx = open_context(flags, "mark");
  const auto prep = prepare(ctx.formula, approx_config(ctx.config, ctx.constants));
  const auto marking_v = verify_marking(ctx.formula, prep.cls, prep.marking);
  const auto bad_v = verify_bad_sat_assignment(ctx.formula, prep.cls, prep.bad);
  const auto lambda_v = verify_lambda_star(ctx.formula, prep.cls, prep.marking, prep.lambda);
  std::vector<std::string> prefix_v;
  for (std::size_t i = 0; i <= prep.lambda.order.size(); ++i)
    for (auto& v : verify_prefix_property(ctx.formula, prep.cls, prep.marking, prep.lambda.prefix(i)))
      prefix_v.push_back("prefix " + std::to_string(i) + ": " + v);
  ctx.report["classification"] = classification_json(prep.cls);
  ctx.report["marking"] = marking_json(prep.marking);
  ctx.report["marking_seed"] = prep.marking_seed;
  ctx.report["lambda_star"] = lambda_star_json(prep.lambda);
  ctx.report["checks"] = {{"marking", marking_v}, {"bad_assignment", bad_v}, {"lambda_star", lambda_v}, {"prefixes", prefix_v}};
  if (ctx.text) {
    header(ctx);
    std::cout << "marked (" << prep.marking.marked.size() << ", seed " << prep.marking_seed
              << "): " << csv(prep.marking.marked) << '\n';
    std::cout << "Lambda*:";
    for (Var v : prep.lambda.order) std::cout << ' ' << (*prep.lambda.assignment.get(v) ? "" : "-") << v;
    std::cout << '\n';
    print_violations(std::cout, "marking", marking_v);
    print_violations(std::cout, "bad-clause assignment", bad_v);
    print_violations(std::cout, "Lambda*", lambda_v);
    print_violations(std::cout, "prefixes", prefix_v);
  }
  emit(ctx);
  return kOk;
}

int cmd_tree(const Flags& flags, std::optional<std::size_t> step, std::optional<Var> pivot, bool nodes) {
  auto ctx = open_context(flags, "tree");
  const auto ac = approx_config(ctx.config, ctx.constants);
  const auto prep = prepare(ctx.formula, ac);
  const std::size_t i = pick_step(prep.lambda, step, pivot);
  const auto tree = build_tree(ctx.formula, prep.cls, prep.marking, prep.lambda.prefix(i), prep.lambda.order[i],
                               ac.estimate.tree);
  const auto violations = check_tree(tree);
  const auto bound = set_size_bound(ctx.formula, tree.stats, ctx.constants.L);
  ctx.report["step"] = i;
  ctx.report["tree"] = tree_json(tree);
  if (!nodes) ctx.report["tree"].erase("nodes");
  ctx.report["checks"] = {{"properties", violations}};
  ctx.report["bounds"] = json::array({bound_json(bound)});
  if (ctx.text) {
    header(ctx);
    const auto& s = tree.stats;
    std::cout << "pivot " << tree.ctx.pivot << " (step " << i << ")  nodes " << s.nodes << "  internal "
              << s.internal << "  leaves " << s.leaves << "  truncating " << s.truncating << "  depth "
              << s.max_depth << "  max|V_I| " << s.max_interior << "  max|V_set| " << s.max_set << '\n';
    std::cout << bound.name << ": " << bound.formula << "  bound " << bound.bound << "  measured " << bound.measured
              << '\n';
    print_violations(std::cout, "node properties", violations);
    if (nodes)
      for (const auto& node : tree.nodes) {
        std::cout << "  #" << node.id << " parent " << node.parent << ' ' << to_string(node.kind) << "  V_I {"
                  << csv(node.interior_vars()) << "}  V_set {" << csv(node.set_vars()) << '}';
        if (node.ratio) std::cout << "  r " << to_string(node.ratio->r);
        std::cout << '\n';
      }
  }
  emit(ctx);
  return kOk;
}

int cmd_estimate(const Flags& flags, std::optional<std::size_t> step, std::optional<Var> pivot) {
  auto ctx = open_context(flags, "estimate");
  const auto ac = approx_config(ctx.config, ctx.constants);
  const auto prep = prepare(ctx.formula, ac);
  const std::size_t i = pick_step(prep.lambda, step, pivot);
  const auto est = estimate_ratio(ctx.formula, prep.cls, prep.marking, prep.lambda.prefix(i), prep.lambda.order[i],
                                  ac.estimate);
  ctx.report["step"] = i;
  ctx.report["pivot"] = prep.lambda.order[i];
  ctx.report["estimate"] = estimate_json(est);
  if (ctx.text) {
    header(ctx);
    std::cout << "pivot " << prep.lambda.order[i] << " (step " << i << ")  tree nodes " << est.tree.nodes << '\n'
              << "p = " << to_decimal(est.p) << "  in [" << to_decimal(est.p_lower) << ", "
              << to_decimal(est.p_upper) << "]  after " << est.trace.size() << " LP queries\n";
  }
  emit(ctx);
  return kOk;
}

int cmd_count(const Flags& flags, bool approx, bool check) {
  auto ctx = open_context(flags, "count");
  if (!approx) {
    const auto exact = exact_count(ctx.formula, ctx.config.component_cap);
    ctx.report["exact"] = exact_count_json(exact);
    if (ctx.text) std::cout << exact.count.str() << '\n';
    emit(ctx);
    return kOk;
  }
  const auto result = approx_count(ctx.formula, approx_config(ctx.config, ctx.constants));
  ctx.report["approx"] = approx_count_json(result);
  std::optional<Integer> truth;
  if (check) {
    truth = exact_count(ctx.formula, ctx.config.component_cap).count;
    const Rational ratio = result.Z / Rational(*truth);
    const auto bounds = exp_bounds(ctx.config.eps > 1 ? Rational(1) : ctx.config.eps);
    ctx.report["check"] = {{"exact", truth->str()},
                           {"ratio", rational_json(ratio)},
                           {"within_eps", ratio * bounds.lower >= 1 && ratio <= bounds.lower}};
  }
  if (ctx.text) {
    header(ctx);
    std::cout << "bad variables " << result.bad_vars << "  bad clauses " << result.bad_clauses << "  marked "
              << result.marked.size() << " (seed " << result.marking_seed << ")\n";
    for (const auto& s : result.steps)
      std::cout << "  v" << s.var << (s.value ? "=T" : "=F") << "  p " << to_decimal(s.p, 8) << "  q "
                << to_decimal(s.q, 8) << "  nodes " << s.tree.nodes << "  LP " << s.lp_calls << '\n';
    std::cout << "residual " << result.residual.count.str() << '\n' << "Z = " << to_decimal(result.Z) << '\n';
    if (truth) std::cout << "exact " << truth->str() << "  Z/exact " << ctx.report["check"]["ratio"]["decimal"].get<std::string>()
                         << (ctx.report["check"]["within_eps"].get<bool>() ? "  within e^eps" : "  OUTSIDE e^eps") << '\n';
  }
  emit(ctx);
  return kOk;
}

int cmd_audit(const Flags& flags, std::size_t expansion, std::size_t samples) {
  auto ctx = open_context(flags, "audit");
  const auto cls = classify(ctx.formula, ctx.constants.delta, ctx.config.bad_fraction);
  AuditOptions options;
  options.expansion_max_size = expansion;
  options.neighborhood_samples = samples;
  options.seed = ctx.config.seed;
  auto report = audit(ctx.formula, cls, options);
  // The tree-size line needs a coupling tree: the first Lambda* step, when there is one.
  std::string tree_note;
  try {
    const auto ac = approx_config(ctx.config, ctx.constants);
    const auto prep = prepare(ctx.formula, ac);
    if (prep.lambda.order.empty()) {
      tree_note = "Lambda* is empty: no coupling tree";
    } else {
      const auto tree = build_tree(ctx.formula, prep.cls, prep.marking, prep.lambda.prefix(0), prep.lambda.order[0],
                                   ac.estimate.tree);
      report.bounds.push_back(set_size_bound(ctx.formula, tree.stats, ctx.constants.L));
    }
  } catch (const Error& e) {
    tree_note = std::string(to_string(e.kind())) + ": " + e.what();
  }
  ctx.report["audit"] = audit_json(report);
  if (!tree_note.empty()) ctx.report["audit"]["tree_note"] = tree_note;
  if (ctx.text) {
    header(ctx);
    std::cout << "high-degree " << report.high_degree << "  bad variables " << report.bad_vars << "  bad clauses "
              << report.bad_clauses << "  bad components " << report.components.size() << '\n';
    for (const auto& e : report.expansion)
      std::cout << "connected clause sets of size " << e.size << ": " << e.sets << "  min |var(Y)| " << e.min_vars
                << "  min |var(Y)|/(k|Y|) " << e.min_ratio << (e.truncated ? " (truncated)" : "") << '\n';
    std::cout << "bounds (printed, not asserted):\n";
    for (const auto& b : report.bounds)
      std::cout << "  " << b.name << ": " << b.formula << "  bound " << b.bound << "  measured " << b.measured << '\n';
    if (!tree_note.empty()) std::cout << "  set_size: not measured (" << tree_note << ")\n";
  }
  emit(ctx);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate model counting for random k-CNF formulas"};
  app.require_subcommand(1);
  Flags flags;

  auto* gen = app.add_subcommand("gen", "generate a random k-CNF formula (DIMACS)");
  std::string output;
  add_common(gen, flags, false);
  gen->add_option("-o,--output", output, "write DIMACS here instead of stdout");

  auto* cls = app.add_subcommand("classify", "good/bad classification");
  add_common(cls, flags);

  auto* mark = app.add_subcommand("mark", "marking and Lambda*, with verifiers");
  add_common(mark, flags);

  std::optional<std::size_t> step;
  std::optional<Var> pivot;
  auto* tree = app.add_subcommand("tree", "coupling tree for one Lambda* step");
  add_common(tree, flags);
  bool nodes = false;
  tree->add_option("--step", step, "index into Lambda*'s order (default 0)");
  tree->add_option("--pivot", pivot, "pivot variable (must be assigned by Lambda*)");
  tree->add_flag("--nodes", nodes, "include every node in the report");

  auto* est = app.add_subcommand("estimate", "ratio estimate for one Lambda* step");
  add_common(est, flags);
  est->add_option("--step", step, "index into Lambda*'s order (default 0)");
  est->add_option("--pivot", pivot, "pivot variable (must be assigned by Lambda*)");

  auto* count = app.add_subcommand("count", "exact or approximate model count");
  add_common(count, flags);
  bool exact_flag = false, approx_flag = false, check = false;
  auto* exact_opt = count->add_flag("--exact", exact_flag, "component-product exact count");
  count->add_flag("--approx", approx_flag, "the approximate counter")->excludes(exact_opt);
  count->add_flag("--check", check, "with --approx: compare against the exact count");

  auto* aud = app.add_subcommand("audit", "structural audit with the bound formulas");
  add_common(aud, flags);
  std::size_t expansion = 3, samples = 32;
  aud->add_option("--expansion-size", expansion, "largest connected clause set enumerated");
  aud->add_option("--samples", samples, "sampled connected variable sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<RunConfig> config;
  try {
    if (flags.dump_config) {
      std::cout << to_json(build_config(flags)).dump(2) << '\n';
      return kOk;
    }
    config = build_config(flags);
    if (*gen) return cmd_gen(flags, output);
    if (*cls) return cmd_classify(flags);
    if (*mark) return cmd_mark(flags);
    if (*tree) return cmd_tree(flags, step, pivot, nodes);
    if (*est) return cmd_estimate(flags, step, pivot);
    if (*count) {
      if (!exact_flag && !approx_flag) throw Error(ErrorKind::InvalidArgument, "count needs --exact or --approx");
      return cmd_count(flags, approx_flag, check);
    }
    if (*aud) return cmd_audit(flags, expansion, samples);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.category()) << "/" << to_string(e.kind()) << "]"
              << (e.stage().empty() ? "" : " in " + e.stage()) << ": " << e.what() << '\n';
    if (config && config->format == "json") {
      json out = report_envelope(command, *config);
      out["error"] = error_json(e);
      std::cout << out.dump(2) << '\n';
    } else if (!config && flags.format.value_or("") == "json") {
      std::cout << json{{"schema", kReportSchema}, {"command", command}, {"error", error_json(e)}}.dump(2) << '\n';
    }
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
