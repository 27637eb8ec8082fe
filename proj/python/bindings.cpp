#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "derivd/calc.hpp"
#include "derivd/experiments.hpp"
#include "derivd/simulator.hpp"

namespace py = pybind11;
using namespace derivd;

namespace {

py::dict metrics_dict(const SimMetrics& m) {
  py::dict d;
  d["capacity"] = m.capacity;
  d["capacity_clamped"] = m.capacity_clamped;
  d["accesses"] = m.accesses;
  d["hits"] = m.hits;
  d["misses"] = m.misses;
  d["hit_rate"] = m.hit_rate;
  d["mean_latency"] = m.mean_latency;
  d["total_compute_steps"] = m.total_compute_steps;
  d["storage_bits"] = m.storage_bits;
  d["energy_j"] = m.energy;
  d["amortized_nats"] = m.amortized_cost;
  d["evictions"] = m.evictions;
  if (m.triality) d["triality_satisfied"] = m.triality->satisfied;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Horn knowledge bases, information metrics, cache simulation and experiment runners";
  m.attr("__version__") = version();

  py::class_<KnowledgeBase>(m, "KnowledgeBase")
      .def_property_readonly("atom_count", &KnowledgeBase::atom_count)
      .def_property_readonly("base_facts", &KnowledgeBase::base_facts)
      .def_property_readonly("rule_count", [](const KnowledgeBase& kb) { return kb.rules().size(); })
      .def_property_readonly("seed", &KnowledgeBase::generation_seed)
      .def("to_text", [](const KnowledgeBase& kb) { return to_text(kb); })
      .def_static("from_text", &kb_from_text, py::arg("text"))
      .def("__eq__", [](const KnowledgeBase& a, const KnowledgeBase& b) { return a == b; });

  m.def("generate_kb", py::overload_cast<std::size_t, std::size_t, double, std::size_t, std::uint64_t>(&generate_kb),
        py::arg("atom_count"), py::arg("rule_count"), py::arg("target_mean_depth"), py::arg("max_arity") = 2,
        py::arg("seed") = 42);
  m.def("forward_closure", [](const KnowledgeBase& kb, std::vector<AtomId> start) {
    return forward_closure(kb, make_atom_set(std::move(start)));
  });
  m.def(
      "logical_depth",
      [](const KnowledgeBase& kb, AtomId target, std::optional<std::vector<AtomId>> start) {
        const AtomSet from = start ? make_atom_set(*start) : kb.base_facts();
        const auto r = logical_depth(kb, target, from);
        return py::make_tuple(r.depth, r.trace);
      },
      py::arg("kb"), py::arg("target"), py::arg("start") = py::none(),
      "(depth or None, post-order rule ids); start defaults to the base facts");
  m.def("atomic_decomposition", [](const KnowledgeBase& kb, std::vector<AtomId> atoms) {
    return atomic_decomposition(kb, make_atom_set(std::move(atoms)));
  });
  m.def("mean_candidate_depth", &mean_candidate_depth);

  m.def(
      "shannon_entropy",
      [](const std::vector<double>& p, const std::string& unit) {
        if (unit != "bits" && unit != "nats") throw std::invalid_argument("unit must be bits or nats");
        return shannon_entropy(p, unit == "bits" ? Unit::bits : Unit::nats);
      },
      py::arg("probabilities"), py::arg("unit") = "bits");
  m.def("derivation_entropy", &derivation_entropy, py::arg("depth"));
  m.def("zipf_weights", &zipf_weights, py::arg("n"), py::arg("alpha"));
  m.def("critical_frequency", &critical_frequency, py::arg("atom_count"), py::arg("c") = 1.0);
  m.def(
      "landauer_energy",
      [](double steps, double temperature) {
        ThermoParams p;
        p.temperature = temperature;
        return landauer_compute_energy(steps, p);
      },
      py::arg("steps"), py::arg("temperature") = 300.0);
  m.def(
      "multi_query_costs",
      [](double storage_bits, std::uint64_t n, const std::vector<double>& p, const std::vector<double>& h) {
        const auto c = multi_query_costs(storage_bits, n, p, h);
        py::dict d;
        d["expected_correct"] = c.expected_correct;
        d["naive_invalid"] = c.naive_invalid;
        d["ratio"] = c.ratio;
        return d;
      },
      py::arg("storage_bits"), py::arg("n_accesses"), py::arg("probabilities"), py::arg("h_derive"));

  m.def(
      "calc",
      [](const std::string& sub, const std::map<std::string, std::string>& args) {
        const auto rec = run_calc(sub, args);
        py::dict d;
        for (const auto& v : rec.outputs) d[py::str(v.name)] = v.value;
        return d;
      },
      py::arg("sub"), py::arg("args") = std::map<std::string, std::string>{});

  m.def(
      "simulate",
      [](const KnowledgeBase& kb, const std::string& policy, double beta, double alpha, std::size_t queries,
         std::size_t stream, std::uint64_t seed) {
        WorkloadSpec w;
        w.alpha = alpha;
        w.query_count = queries;
        w.stream_length = stream;
        w.seed = seed;
        const Scenario sc = make_scenario(kb, w, InfoModel::for_kb(kb));
        SimConfig cfg;
        cfg.policy = parse_policy(policy);
        cfg.beta = beta;
        return metrics_dict(run_stream(sc, cfg));
      },
      py::arg("kb"), py::arg("policy") = "freqdepth", py::arg("beta") = 0.05, py::arg("alpha") = 1.2,
      py::arg("queries") = 1000, py::arg("stream") = 100000, py::arg("seed") = 42);

  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& config_json) {
        const auto id = parse_experiment(name);
        const auto cfg = config_json.empty()
                             ? ExperimentConfig::defaults(id)
                             : ExperimentConfig::from_json(nlohmann::ordered_json::parse(config_json, nullptr, true, true), id);
        cfg.validate();
        const auto report = run_experiment(cfg);
        return py::make_tuple(to_csv(report), to_json(report).dump(2));
      },
      py::arg("name"), py::arg("config_json") = "",
      "Runs exp1..exp4 and returns (csv text, json text)");
}
