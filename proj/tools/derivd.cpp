// derivd command line: experiments, formula calculators and single runs.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "derivd/calc.hpp"
#include "derivd/experiments.hpp"
#include "derivd/simulator.hpp"

namespace {

using namespace derivd;
using json = nlohmann::ordered_json;

struct ExpOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> workers;
};

int run_exp(ExperimentId id, const ExpOptions& opt) {
  ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig::defaults(id) : ExperimentConfig::load(opt.config, id);
  if (cfg.id != id)
    throw std::invalid_argument("config " + opt.config + " describes " + to_string(cfg.id) + ", not " + to_string(id));
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.workload.seed = *opt.seed;
  }
  if (opt.workers) cfg.workers = *opt.workers;
  std::filesystem::path out = !opt.out.empty()              ? std::filesystem::path(opt.out)
                              : !cfg.output_dir.empty() ? std::filesystem::path(cfg.output_dir)
                                                        : default_output_dir();
  cfg.validate();
  const ExperimentReport report = run_experiment(cfg);
  const auto paths = emit_report(report, out);
  std::cout << "wrote " << paths.csv.string() << " (" << report.rows.size() << " rows)\n";
  std::cout << "wrote " << paths.json.string() << "\n";
  return 0;
}

struct SimOptions {
  std::string kb_path;
  std::size_t atoms = 2000;
  std::size_t rules = 6000;
  double depth = 5.0;
  std::string policy = "freqdepth";
  double tau_scale = 1.0;
  double decay = 0.9999;
  bool oracle = false;
  std::optional<std::size_t> capacity;
  double beta = 0.05;
  std::string kind = "zipf";
  double alpha = 1.2;
  std::size_t queries = 1000;
  std::size_t stream = 100000;
  std::uint64_t seed = 42;
  double warmup = 0.1;
};

int run_simulate(const SimOptions& o) {
  const KnowledgeBase kb = o.kb_path.empty() ? generate_kb(KbSpec{o.atoms, o.rules, o.depth, 2, o.seed, 0.1})
                                             : load_kb(o.kb_path);
  WorkloadSpec w;
  w.kind = parse_distribution_kind(o.kind);
  w.alpha = o.alpha;
  w.query_count = o.queries;
  w.stream_length = o.stream;
  w.seed = o.seed;
  const Scenario sc = make_scenario(kb, w, InfoModel::for_kb(kb));

  SimConfig cfg;
  cfg.policy = parse_policy(o.policy);
  cfg.params.tau_scale = o.tau_scale;
  cfg.params.decay = o.decay;
  cfg.params.oracle_frequency = o.oracle;
  cfg.capacity = o.capacity;
  cfg.beta = o.beta;
  cfg.warmup_fraction = o.warmup;
  const SimMetrics m = run_stream(sc, cfg);
  if (m.capacity_clamped)
    std::cerr << "warning: capacity clamped to the query universe (" << sc.query_count() << ")\n";

  json j;
  j["policy"] = to_string(cfg.policy);
  j["capacity"] = m.capacity;
  j["accesses"] = m.accesses;
  j["hits"] = m.hits;
  j["misses"] = m.misses;
  j["hit_rate"] = m.hit_rate;
  j["mean_latency"] = m.mean_latency;
  j["total_compute_steps"] = m.total_compute_steps;
  j["storage_bits"] = m.storage_bits;
  j["energy_j"] = m.energy;
  j["amortized_nats"] = m.amortized_cost;
  j["evictions"] = m.evictions;
  if (m.triality) j["triality"] = {{"product", m.triality->product}, {"bound", m.triality->bound},
                                   {"satisfied", m.triality->satisfied}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivd: storage versus derivation trade-offs over Horn knowledge bases"};
  app.set_version_flag("--version", std::string(derivd::version()));
  app.require_subcommand(1);

  ExpOptions exp_opt;
  std::optional<ExperimentId> chosen;
  const std::pair<const char*, const char*> exps[] = {
      {"exp1", "amortized-cost bound satisfaction across KB sizes"},
      {"exp2", "latency versus storage fraction and the transition point"},
      {"exp3", "cache policy comparison across cache sizes"},
      {"exp4", "cost sensitivity to skew, depth and KB size"}};
  for (const auto& [name, help] : exps) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", exp_opt.config, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--seed", exp_opt.seed, "global seed override");
    sub->add_option("--out", exp_opt.out, "output directory (default: $DERIVD_OUT or ./results)");
    sub->add_option("--workers", exp_opt.workers, "worker threads (0 = all cores)");
    const std::string id = name;
    sub->callback([&chosen, id] { chosen = parse_experiment(id); });
  }

  auto* calc = app.add_subcommand("calc", "formula calculators");
  calc->require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> calc_args;
  std::string calc_sub;
  for (const auto& spec : calc_specs()) {
    auto* sub = calc->add_subcommand(spec.name, spec.formula);
    auto& store = calc_args[spec.name];
    for (const auto& arg : spec.args) {
      const std::string unit = arg.unit.empty() ? "" : " [" + arg.unit + "]";
      sub->add_option_function<std::string>(
             "--" + arg.name, [&store, name = arg.name](const std::string& v) { store[name] = v; },
             arg.help + unit + " (default " + arg.default_value + ")");
    }
    sub->callback([&calc_sub, name = spec.name] { calc_sub = name; });
  }

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run one policy over one sampled stream");
  simulate->add_option("--kb", sim.kb_path, "KB text file (generated when omitted)")->check(CLI::ExistingFile);
  simulate->add_option("--atoms", sim.atoms, "generated KB atom count");
  simulate->add_option("--rules", sim.rules, "generated KB rule count");
  simulate->add_option("--depth", sim.depth, "generated KB target mean depth");
  simulate->add_option("--policy", sim.policy, "lru|lfu|truemi|freqdepth|threshold")
      ->check(CLI::IsMember({"lru", "lfu", "truemi", "freqdepth", "threshold"}, CLI::ignore_case));
  simulate->add_option("--tau-scale", sim.tau_scale, "threshold scale; tau = tau_scale * ln(atoms)");
  simulate->add_option("--decay", sim.decay, "FreqDepth counter decay per access");
  simulate->add_flag("--oracle", sim.oracle, "FreqDepth ranks by true frequency");
  auto* cap_opt = simulate->add_option("--capacity", sim.capacity, "cache entries");
  simulate->add_option("--beta", sim.beta, "cacheable share of the query set")->excludes(cap_opt);
  simulate->add_option("--kind", sim.kind, "zipf|uniform");
  simulate->add_option("--alpha", sim.alpha, "Zipf exponent");
  simulate->add_option("--queries", sim.queries, "distinct queries");
  simulate->add_option("--stream", sim.stream, "stream length");
  simulate->add_option("--seed", sim.seed, "seed");
  simulate->add_option("--warmup", sim.warmup, "warm-up share excluded from statistics");

  KbSpec gen;
  std::string gen_out;
  auto* kbgen = app.add_subcommand("kb-gen", "generate a layered Horn KB in text form");
  kbgen->add_option("--atoms", gen.atom_count, "atom count");
  kbgen->add_option("--rules", gen.rule_count, "rule count");
  kbgen->add_option("--depth", gen.target_mean_depth, "target mean depth");
  kbgen->add_option("--max-arity", gen.max_arity, "maximum rule arity");
  kbgen->add_option("--seed", gen.seed, "seed");
  kbgen->add_option("--out", gen_out, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (chosen) return run_exp(*chosen, exp_opt);
    if (calc->parsed()) {
      const auto record = run_calc(calc_sub, calc_args[calc_sub]);
      std::cout << format_calc(record);
      return 0;
    }
    if (simulate->parsed()) return run_simulate(sim);
    if (kbgen->parsed()) {
      const KnowledgeBase kb = generate_kb(gen);
      if (gen_out.empty())
        std::cout << to_text(kb);
      else
        save_kb(kb, gen_out);
      return 0;
    }
  } catch (const CalcUsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
