// rpgraph: batch analysis of bidding histories.
//
// Exit codes: 0 ok, 1 rule violation, 2 malformed input or usage, 3 internal.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rpgraph/core.hpp"
#include "rpgraph/cycles.hpp"
#include "rpgraph/io.hpp"
#include "rpgraph/rules.hpp"
#include "rpgraph/valuation.hpp"

namespace {

using namespace rpgraph;
using io::Json;

struct Options {
  std::string input = "-";
  std::string output = "-";
  std::string format = "json";
  std::string rule = "garp";
  std::size_t k = 2;
  std::string epsilon = "0";
  std::size_t budget = 2;
  std::string kind;
  std::string bounds;
  std::string lmax = "1";
  std::size_t n = 0;
};

std::vector<Observation> load(const std::string& path) {
  if (path == "-") return io::read_observations(std::cin);
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  return io::read_observations(in);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_argument, "cannot open '" + path + "'");
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(0, path + ": invalid JSON");
  return j;
}

RuleConfig rule_config(const Options& o) {
  RuleConfig cfg{parse_rule(o.rule), o.k, Rational::parse(o.epsilon)};
  cfg.validate();
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string ids(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string rounds(const std::vector<RoundId>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s + "]";
}

void print_verdict_text(std::ostream& os, const std::string& label, const RuleVerdict& v) {
  os << label << ": " << (v.accepted ? "accepted" : "rejected");
  if (v.worst_mean) os << " (worst mean " << v.worst_mean->str() << ", implied epsilon " << v.implied_epsilon.str() << ")";
  os << '\n';
  if (v.violation)
    os << "  cycle " << ids(v.violation->vertices) << " witness rounds " << rounds(v.violation->witness_rounds) << '\n';
  if (v.withdrawal_advice) {
    os << "  withdrawal advice:";
    if (v.withdrawal_advice->sets.empty()) os << " none within budget";
    for (const auto& s : v.withdrawal_advice->sets) os << ' ' << ids(s);
    if (!v.withdrawal_advice->complete) os << " (incomplete)";
    os << '\n';
  }
}

int cmd_analyze(const Options& o) {
  const auto obs = load(o.input);
  const auto g = BiddingGraph::build(obs);
  const RuleConfig cfg = rule_config(o);
  const Json report = io::analysis_json(g, o.k, cfg.epsilon, {true, o.budget, {}});
  const bool accepted = report["verdicts"][std::string(to_string(cfg.rule))]["accepted"].get<bool>();

  Output out(o.output);
  auto& os = out.stream();
  if (o.format == "text") {
    os << "rounds " << g.round_count() << ", vertices " << g.vertex_count() << ", arcs " << g.arc_count() << '\n';
    const auto mmc = min_mean_cycle(g);
    if (mmc.mu) {
      os << "mu " << mmc.mu->str() << " (" << mmc.mu->decimal() << ")\n";
      os << "certificate " << ids(mmc.certificate->vertices) << " witness rounds "
         << rounds(mmc.certificate->witness_rounds) << '\n';
      if (mmc.mu->sign() > 0) os << "delta-confidence " << mmc.mu->str() << '\n';
    } else {
      os << "mu none (no cycles)\n";
    }
    os << "implied epsilon " << report["implied_epsilon"].get<std::string>() << '\n';
    for (Rule rule : {Rule::warp, Rule::karp, Rule::garp}) {
      RuleConfig c{rule, o.k, cfg.epsilon};
      std::string label = std::string(to_string(rule));
      if (rule == Rule::karp) label += "(" + std::to_string(o.k) + ")";
      print_verdict_text(os, label + " at epsilon " + cfg.epsilon.str(), evaluate_rule(g, c, {true, o.budget, {}}));
    }
  } else {
    os << report.dump(2) << '\n';
  }
  return accepted ? 0 : 1;
}

int cmd_fit(const Options& o) {
  const auto obs = load(o.input);
  const auto g = BiddingGraph::build(obs);
  const auto mmc = min_mean_cycle(g);
  Json report;
  if (o.kind == "min") {
    report = io::to_json(min_ir_valuation(g, mmc), g);
  } else if (o.kind == "max") {
    if (o.bounds.empty()) fail(ErrorCode::invalid_argument, "fit --kind max requires --bounds");
    const auto v = max_valuation(g, io::bounds_from_json(load_json(o.bounds), g), mmc);
    report = io::to_json(v, g);
    if (!v.bounded()) {
      Json unbounded = Json::array();
      for (BundleId id = 0; id < v.values.size(); ++id)
        if (!v.values[id]) unbounded.push_back(io::to_json(g.bundle(id)));
      report["unbounded_bundles"] = std::move(unbounded);
    }
  } else {
    fail(ErrorCode::invalid_argument, "--kind must be min or max");
  }
  report["mu"] = io::to_json(mmc.mu);
  Output out(o.output);
  out.stream() << report.dump(2) << '\n';
  return 0;
}

int cmd_validate(const Options& o) {
  auto obs = load(o.input);
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.round < b.round; });
  const RuleConfig cfg = rule_config(o);
  Output out(o.output);
  auto& os = out.stream();

  BiddingGraph g(obs.front().dimension());
  std::size_t rejected = 0;
  for (const auto& bid : obs) {
    g.add(bid);
    const auto v = evaluate_rule(g, cfg, {true, o.budget, {}});
    if (!v.accepted) ++rejected;
    if (o.format == "text") {
      print_verdict_text(os, "round " + std::to_string(bid.round), v);
    } else {
      Json line{{"t", bid.round}};
      line.update(io::to_json(v, &g));
      os << line.dump() << '\n';
    }
  }
  Json summary{{"rounds", obs.size()}, {"accepted", obs.size() - rejected}, {"rejected", rejected},
               {"rule", io::to_json(cfg)}};
  if (o.format == "text")
    os << "summary: " << obs.size() - rejected << " accepted, " << rejected << " rejected\n";
  else
    os << Json{{"summary", summary}}.dump() << '\n';
  return rejected ? 1 : 0;
}

int cmd_afriat(const Options& o) {
  const auto obs = load(o.input);
  const auto g = BiddingGraph::build(obs);
  const Rational epsilon = Rational::parse(o.epsilon);
  AfriatResult r;
  if (o.bounds.empty()) {
    r = afriat_lambda(g, epsilon);
  } else {
    Valuation v;
    v.values.resize(g.vertex_count());
    for (const auto& [id, value] : io::bounds_from_json(load_json(o.bounds), g)) v.values[id] = value;
    v.individually_rational = is_individually_rational(g, v.values);
    r = afriat_lambda(g, epsilon, v);
  }
  Output out(o.output);
  out.stream() << io::to_json(r, g).dump(2) << '\n';
  return 0;
}

int cmd_withdraw(const Options& o) {
  const auto obs = load(o.input);
  const auto g = BiddingGraph::build(obs);
  const RuleConfig cfg = rule_config(o);
  const auto advice = withdrawal_advice(g, cfg, o.budget);
  Json report = io::to_json(advice, &g);
  report["rule"] = io::to_json(cfg);
  report["accepted"] = rule_accepts(g.lengths(), cfg);
  Output out(o.output);
  out.stream() << report.dump(2) << '\n';
  return 0;
}

int cmd_fixture(const Options& o) {
  if (o.kind != "tight-cycle") fail(ErrorCode::invalid_argument, "--kind must be tight-cycle");
  const Rational lmax = Rational::parse(o.lmax);
  const auto m = tight_cycle_fixture(o.k, lmax, o.n);
  const auto mmc = min_mean_cycle(m);
  Json report{{"kind", "tight-cycle"}, {"k", o.k}, {"lmax", io::to_json(lmax)}, {"n", o.n},
              {"lengths", io::to_json(m)}, {"mu", io::to_json(mmc.mu)}};
  report["certificate"] = io::to_json(*mmc.certificate);
  Output out(o.output);
  out.stream() << report.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Revealed-preference analysis of bidding histories"};
  app.require_subcommand(1);
  Options o;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "observations (JSON Lines), '-' for stdin")->required();
    sub->add_option("-o,--output", o.output, "output path, '-' for stdout");
    sub->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_rule = [&](CLI::App* sub) {
    sub->add_option("--rule", o.rule, "warp, karp or garp")->check(CLI::IsMember({"warp", "karp", "garp"}));
    sub->add_option("--k", o.k, "KARP cycle bound (cardinality <= k+1)")->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", o.epsilon, "rationality tolerance (decimal)");
    sub->add_option("--budget", o.budget, "max withdrawal set size")->check(CLI::PositiveNumber);
  };

  auto* analyze = app.add_subcommand("analyze", "minimum mean cycle, certificate and rule verdicts");
  add_io(analyze);
  add_rule(analyze);
  auto* fit = app.add_subcommand("fit", "minimum IR or maximum bounded valuation");
  add_io(fit);
  fit->add_option("--kind", o.kind, "min or max")->required()->check(CLI::IsMember({"min", "max"}));
  fit->add_option("--bounds", o.bounds, "upper bounds (valuation JSON) for --kind max");
  auto* validate = app.add_subcommand("validate", "replay rounds, validating each against its prefix");
  add_io(validate);
  add_rule(validate);
  auto* afriat = app.add_subcommand("afriat", "Afriat-index analog by arc deletion");
  add_io(afriat);
  afriat->add_option("--epsilon", o.epsilon, "target tolerance (decimal)");
  afriat->add_option("--valuation", o.bounds, "valuation JSON to use instead of the minimum IR fit");
  auto* withdraw = app.add_subcommand("withdraw", "minimum bid-withdrawal sets");
  add_io(withdraw);
  add_rule(withdraw);
  auto* fixture = app.add_subcommand("fixture", "emit a tight length-matrix fixture");
  fixture->add_option("--kind", o.kind, "fixture kind")->required()->check(CLI::IsMember({"tight-cycle"}));
  fixture->add_option("--k", o.k, "cycle bound")->required()->check(CLI::PositiveNumber);
  fixture->add_option("--lmax", o.lmax, "maximum |arc length| (decimal)")->required();
  fixture->add_option("--n", o.n, "vertex count")->required();
  fixture->add_option("-o,--output", o.output, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*analyze) return cmd_analyze(o);
    if (*fit) return cmd_fit(o);
    if (*validate) return cmd_validate(o);
    if (*afriat) return cmd_afriat(o);
    if (*withdraw) return cmd_withdraw(o);
    if (*fixture) return cmd_fixture(o);
  } catch (const Error& e) {
    std::cerr << "error: " << (e.code() == ErrorCode::empty_input ? "no observations" : e.what()) << '\n';
    return e.code() == ErrorCode::internal ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
