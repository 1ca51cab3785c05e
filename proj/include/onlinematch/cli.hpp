#pragma once

// Command-line front end. run_cli() is the whole program minus main(), so
// tests can drive it in-process and compare outputs byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "onlinematch/analysis.hpp"
#include "onlinematch/instance.hpp"
#include "onlinematch/market.hpp"
#include "onlinematch/matchers.hpp"
#include "onlinematch/report.hpp"
#include "onlinematch/stats.hpp"

namespace onlinematch::cli {

// Sub-streams of the master seed reserved for non-trial randomness.
inline constexpr std::uint64_t kInstanceStream = 0x8000000000000001ULL;
inline constexpr std::uint64_t kSigmaStream = 0x8000000000000002ULL;

struct ExperimentConfig {
  std::string subcommand;
  std::optional<std::size_t> kvv;
  std::vector<std::string> random_spec;  // NL NR P
  std::string file;
  std::string scheme = "exp";
  std::string sigma = "identity";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double level = kDefaultLevel;
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;

  // subcommand-specific
  std::vector<std::size_t> edge;  // claim1: I J
  std::string algorithm = "ranking-market";
  std::optional<double> min_ratio, max_ratio;
  std::optional<std::size_t> n;   // remark3
  std::uint64_t sweep = 2000;     // properties
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string instance_source(const ExperimentConfig& c) {
  if (c.kvv) return "kvv:" + std::to_string(*c.kvv);
  if (!c.random_spec.empty()) {
    return "random:" + c.random_spec[0] + ":" + c.random_spec[1] + ":" + c.random_spec[2];
  }
  if (!c.file.empty()) return "file:" + c.file;
  return "none";
}

inline BipartiteInstance load_instance(const ExperimentConfig& c) {
  const int given = (c.kvv ? 1 : 0) + (!c.random_spec.empty() ? 1 : 0) + (!c.file.empty() ? 1 : 0);
  if (given != 1) throw UsageError("exactly one of --kvv, --random, --file is required");
  if (c.kvv) return kvv_hard_instance(*c.kvv);
  if (!c.random_spec.empty()) {
    std::size_t nl = 0, nr = 0;
    double p = 0;
    try {
      nl = std::stoul(c.random_spec[0]);
      nr = std::stoul(c.random_spec[1]);
      p = std::stod(c.random_spec[2]);
    } catch (const std::exception&) {
      throw UsageError("--random expects NL NR P");
    }
    return random_bipartite(nl, nr, p, derive_seed(c.seed, kInstanceStream));
  }
  std::ifstream in(c.file);
  if (!in) throw std::runtime_error("cannot read instance file '" + c.file + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline ArrivalOrder load_sigma(const ExperimentConfig& c, std::size_t n_left) {
  return make_sigma(parse_sigma_kind(c.sigma), n_left, derive_seed(c.seed, kSigmaStream));
}

inline Record base_config(const ExperimentConfig& c) {
  return {{"command", c.subcommand},
          {"instance", instance_source(c)},
          {"scheme", c.scheme},
          {"sigma", c.sigma},
          {"trials", c.trials},
          {"seed", c.seed},
          {"level", c.level}};
}

inline Record estimate_fields(const EstimateWithCI& e) {
  return {{"mean", e.mean}, {"half_width", e.half_width}, {"std_error", e.std_error()}};
}

inline void append(Record& r, const Record& more) { r.insert(r.end(), more.begin(), more.end()); }

struct Outcome {
  Report report;
  bool ok = true;
  std::string summary;  // human-readable line for the log stream
};

inline Outcome cmd_ratio(const ExperimentConfig& c) {
  const BipartiteInstance g = load_instance(c);
  const ArrivalOrder sigma = load_sigma(c, g.n_left());
  const Algorithm alg = parse_algorithm(c.algorithm);
  const RatioEstimate r =
      estimate_competitive_ratio(g, sigma, alg, c.trials, c.seed, c.level, c.threads);
  Outcome o;
  o.report.config = base_config(c);
  o.report.config.emplace_back("algorithm", std::string(to_string(alg)));
  Record row = {{"optimum", static_cast<std::uint64_t>(r.optimum)}};
  append(row, estimate_fields(r.ratio));
  row.emplace_back("bound", kOneMinusInvE);
  row.emplace_back("meets_bound", passes_edge_bound(r.ratio));
  bool in_band = true;
  if (c.min_ratio) in_band = in_band && r.ratio.mean >= *c.min_ratio;
  if (c.max_ratio) in_band = in_band && r.ratio.mean <= *c.max_ratio;
  row.emplace_back("in_band", in_band);
  o.report.results.push_back(std::move(row));
  o.ok = in_band;
  o.summary = "ratio " + format_double(r.ratio.mean) + " +/- " + format_double(r.ratio.half_width);
  return o;
}

inline Outcome cmd_claim1(const ExperimentConfig& c) {
  const BipartiteInstance g = load_instance(c);
  const ArrivalOrder sigma = load_sigma(c, g.n_left());
  std::vector<Edge> edges;
  if (!c.edge.empty()) {
    if (c.edge[0] >= g.n_left() || c.edge[1] >= g.n_right() || !g.has_edge(c.edge[0], c.edge[1])) {
      throw UsageError("--edge " + std::to_string(c.edge[0]) + " " + std::to_string(c.edge[1]) +
                       " is not an edge of the instance");
    }
    edges.emplace_back(c.edge[0], c.edge[1]);
  } else {
    edges = g.edges();
  }
  if (edges.empty()) throw UsageError("instance has no edges");
  const auto estimates =
      estimate_edges(g, sigma, edges, parse_scheme(c.scheme), c.trials, c.seed, c.level, c.threads);
  Outcome o;
  o.report.config = base_config(c);
  std::size_t failures = 0;
  for (const auto& e : estimates) {
    const bool pass = passes_edge_bound(e.estimate);
    failures += !pass;
    Record row = {{"i", static_cast<std::uint64_t>(e.i)}, {"j", static_cast<std::uint64_t>(e.j)}};
    append(row, estimate_fields(e.estimate));
    row.emplace_back("threshold", kOneMinusInvE - 4.0 * e.estimate.half_width);
    row.emplace_back("pass", pass);
    o.report.results.push_back(std::move(row));
  }
  o.ok = failures == 0;
  o.summary = std::to_string(estimates.size() - failures) + " / " +
              std::to_string(estimates.size()) + " edges meet the 1-1/e bound";
  return o;
}

inline Outcome cmd_remark3(const ExperimentConfig& c) {
  if (!c.n) throw UsageError("remark3 requires --n");
  const Remark3Report r = remark3_report(*c.n, c.trials, c.seed, c.level, c.threads);
  Outcome o;
  o.report.config = base_config(c);
  o.report.config[1].second = "kvv:" + std::to_string(*c.n);
  o.report.config[2].second = std::string("exp+uniform");
  auto row = [&](const char* metric, const EstimateWithCI& e, double reference, bool pass) {
    Record rec = {{"metric", std::string(metric)}};
    append(rec, estimate_fields(e));
    rec.emplace_back("reference", reference);
    rec.emplace_back("pass", pass);
    o.report.results.push_back(std::move(rec));
    return pass;
  };
  const bool exp_ok = row("edge_exp", r.exponential, kOneMinusInvE, passes_edge_bound(r.exponential));
  // Expected to miss the bound: this is the counterexample.
  const bool uni_ok = row("edge_uniform", r.uniform, kOneMinusInvE, !passes_edge_bound(r.uniform));
  const bool service_ok =
      row("last_buyer_served", r.service, r.expected_probability, r.service_z() <= 4.0);
  row("last_item_maximal", r.last_item_maximal, r.expected_probability, r.maximal_z() <= 4.0);
  o.ok = exp_ok && uni_ok && service_ok;
  o.summary = "served_without_maximal=" + std::to_string(r.served_without_maximal);
  return o;
}

inline Outcome cmd_properties(const ExperimentConfig& c) {
  const BipartiteInstance g = load_instance(c);
  const PropertySweep s = property_sweep(g, parse_sigma_kind(c.sigma), parse_scheme(c.scheme),
                                         c.sweep, c.seed, c.threads);
  Outcome o;
  o.report.config = base_config(c);
  o.report.config[4].second = c.sweep;
  o.report.results.push_back({{"property1_violations", s.property1_violations},
                              {"property2_violations", s.property2_violations},
                              {"availability_violations", s.availability_violations},
                              {"violations", s.violations()}});
  o.ok = s.violations() == 0;
  o.summary = std::to_string(s.violations()) + " violations / " + std::to_string(s.trials) + " trials";
  return o;
}

inline Outcome cmd_oracle_check(const ExperimentConfig& c) {
  const BipartiteInstance g = load_instance(c);
  if (g.n_right() > 8) throw UsageError("oracle-check needs n_right <= 8");
  const ArrivalOrder sigma = load_sigma(c, g.n_left());
  const Rational exact = exact_ranking_expectation(g, sigma);
  const EstimateWithCI mc = estimate_ranking_size(g, sigma, c.trials, c.seed, c.level, c.threads);
  const double gap = std::abs(exact.value() - mc.mean);
  const double in_widths = mc.half_width > 0.0 ? gap / mc.half_width : (gap == 0.0 ? 0.0 : INFINITY);
  Outcome o;
  o.report.config = base_config(c);
  Record row = {{"exact_num", exact.num}, {"exact_den", exact.den}, {"exact", exact.value()}};
  Record mcf = estimate_fields(mc);
  mcf[0].first = "mc_mean";
  append(row, mcf);
  row.emplace_back("gap_in_half_widths", in_widths);
  row.emplace_back("pass", in_widths <= 4.0);
  o.report.results.push_back(std::move(row));
  o.ok = in_widths <= 4.0;
  o.summary = "exact " + std::to_string(exact.num) + "/" + std::to_string(exact.den) + ", mc " +
              format_double(mc.mean);
  return o;
}

// One market run on the weights of trial 0; dumps buyers, items and totals.
inline Outcome cmd_run(const ExperimentConfig& c) {
  const BipartiteInstance g = load_instance(c);
  const ArrivalOrder sigma = load_sigma(c, g.n_left());
  const PriceAssignment pa(draw_weights(g.n_right(), derive_seed(c.seed, 0)), parse_scheme(c.scheme));
  const MarketOutcome out = run_market(g, pa, sigma);
  const WelfareTotals totals = welfare_decomposition(out);
  Outcome o;
  o.report.config = base_config(c);
  o.report.config[4].second = std::uint64_t{1};
  std::vector<std::int64_t> arrival_pos(g.n_left(), -1);
  for (std::size_t k = 0; k < sigma.size(); ++k) arrival_pos[sigma[k]] = static_cast<std::int64_t>(k);
  std::vector<std::int64_t> buyer_of(g.n_right(), -1);
  for (std::size_t i = 0; i < g.n_left(); ++i)
    if (auto j = out.matching.partner(i)) buyer_of[*j] = static_cast<std::int64_t>(i);

  for (std::size_t i = 0; i < g.n_left(); ++i) {
    auto j = out.matching.partner(i);
    o.report.results.push_back({{"vertex", std::string("buyer")},
                                {"index", static_cast<std::int64_t>(i)},
                                {"arrival", arrival_pos[i]},
                                {"partner", j ? static_cast<std::int64_t>(*j) : std::int64_t{-1}},
                                {"weight", j ? pa.weight(*j) : 0.0},
                                {"price", j ? pa.price(*j) : 0.0},
                                {"utility", out.utils[i]},
                                {"revenue", 0.0}});
  }
  for (std::size_t j = 0; j < g.n_right(); ++j) {
    o.report.results.push_back({{"vertex", std::string("item")},
                                {"index", static_cast<std::int64_t>(j)},
                                {"arrival", std::int64_t{-1}},
                                {"partner", buyer_of[j]},
                                {"weight", pa.weight(j)},
                                {"price", pa.price(j)},
                                {"utility", 0.0},
                                {"revenue", out.revs[j]}});
  }
  o.report.results.push_back({{"vertex", std::string("total")},
                              {"index", static_cast<std::int64_t>(totals.matching_size)},
                              {"arrival", std::int64_t{-1}},
                              {"partner", std::int64_t{-1}},
                              {"weight", 0.0},
                              {"price", 0.0},
                              {"utility", totals.total_utility},
                              {"revenue", totals.total_revenue}});
  o.ok = totals.residual() <= kFloatSlack;
  o.summary = "welfare " + format_double(totals.total_utility + totals.total_revenue) +
              " = |M| " + std::to_string(totals.matching_size);
  return o;
}

inline void add_instance_options(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--kvv", c.kvv, "upper-triangular hard instance of size N");
  sub->add_option("--random", c.random_spec, "random instance: NL NR P")->expected(3);
  sub->add_option("--file", c.file, "instance file in the text interchange format");
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default: stdout)");
}

inline void add_experiment_options(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--scheme", c.scheme, "price scheme")
      ->check(CLI::IsMember({"exp", "uniform"}))
      ->capture_default_str();
  sub->add_option("--sigma", c.sigma, "arrival order")
      ->check(CLI::IsMember({"identity", "reversed", "random"}))
      ->capture_default_str();
  sub->add_option("--trials", c.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--level", c.level, "confidence level")
      ->check(CLI::Range(0.5, 0.999999))
      ->capture_default_str();
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RANKING and its posted-price market: experiments and oracles", "ranking_cli"};
  app.require_subcommand(1);
  ExperimentConfig c;

  auto* gen = app.add_subcommand("gen", "write an instance in the text format");
  detail::add_instance_options(gen, c);

  auto* ratio = app.add_subcommand("ratio", "estimate E[|M|]/|M*|");
  detail::add_instance_options(ratio, c);
  detail::add_experiment_options(ratio, c);
  ratio->add_option("--algorithm", c.algorithm, "ranking-market | random-greedy | greedy")
      ->check(CLI::IsMember({"ranking-market", "random-greedy", "greedy"}))
      ->capture_default_str();
  ratio->add_option("--min", c.min_ratio, "fail unless the mean ratio is at least this");
  ratio->add_option("--max", c.max_ratio, "fail unless the mean ratio is at most this");

  auto* claim1 = app.add_subcommand("claim1", "per-edge E[util_i + rev_j] against 1-1/e");
  detail::add_instance_options(claim1, c);
  detail::add_experiment_options(claim1, c);
  claim1->add_option("--edge", c.edge, "single edge I J")->expected(2);

  auto* remark3 = app.add_subcommand("remark3", "uniform vs exponential prices on the hard instance");
  remark3->add_option("--n", c.n, "instance size")->required();
  remark3->add_option("--seed", c.seed, "master seed")->capture_default_str();
  remark3->add_option("--out", c.out, "output path (default: stdout)");
  detail::add_experiment_options(remark3, c);

  auto* props = app.add_subcommand("properties", "sweep the structural properties of the bound");
  detail::add_instance_options(props, c);
  detail::add_experiment_options(props, c);
  props->add_option("--sweep", c.sweep, "number of random draws")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* oracle = app.add_subcommand("oracle-check", "exact RANKING expectation vs Monte Carlo");
  detail::add_instance_options(oracle, c);
  detail::add_experiment_options(oracle, c);

  auto* run = app.add_subcommand("run", "replay one market and dump the outcome");
  detail::add_instance_options(run, c);
  detail::add_experiment_options(run, c);

  std::vector<const char*> argv{"ranking_cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto* chosen = app.get_subcommands().front();
  c.subcommand = chosen->get_name();
  const auto start = std::chrono::steady_clock::now();

  try {
    std::ofstream file;
    std::ostream* os = &out;
    if (!c.out.empty()) {
      file.open(c.out);
      if (!file) throw std::runtime_error("cannot open '" + c.out + "' for writing");
      os = &file;
    }

    if (c.subcommand == "gen") {
      const BipartiteInstance g = detail::load_instance(c);
      if (!c.random_spec.empty()) *os << "# " << detail::instance_source(c) << " seed " << c.seed << '\n';
      *os << serialize(g);
      return 0;
    }

    detail::Outcome o;
    if (c.subcommand == "ratio") o = detail::cmd_ratio(c);
    else if (c.subcommand == "claim1") o = detail::cmd_claim1(c);
    else if (c.subcommand == "remark3") o = detail::cmd_remark3(c);
    else if (c.subcommand == "properties") o = detail::cmd_properties(c);
    else if (c.subcommand == "oracle-check") o = detail::cmd_oracle_check(c);
    else o = detail::cmd_run(c);

    if (c.format == "json") write_json(*os, o.report);
    else write_csv(*os, o.report);

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << c.subcommand << ": " << o.summary << " (" << format_double(elapsed.count()) << " s)\n";
    return o.ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace onlinematch::cli
