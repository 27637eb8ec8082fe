#include "derivd/calc.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>

#include "derivd/metrics.hpp"
#include "derivd/thermo.hpp"

namespace derivd {

const CalcValue& CalcRecord::output(const std::string& name) const {
  for (const auto& o : outputs)
    if (o.name == name) return o;
  throw std::out_of_range("calc " + sub + " has no output '" + name + "'");
}

const std::vector<CalcSpec>& calc_specs() {
  static const std::vector<CalcSpec> specs = {
      {"critical-storage",
       "M_c = H(Q) / log2(E / (H(Q|K) k_B T ln 2))",
       {{"h-total", "1e12", "bits", "total query entropy H(Q)"},
        {"energy", "3.6e12", "J", "energy budget"},
        {"h-residual", "1e6", "bits", "residual entropy H(Q|K)"},
        {"temp", "300", "K", "temperature"}}},
      {"critical-frequency",
       "f_c = 1 + 1 / (c ln m)",
       {{"atoms", "1e9", "atoms", "atomic basis size m"}, {"c", "1", "", "encoding constant"}}},
      {"landauer",
       "E_compute = d k_B T ln 2;  E_storage = bits k_B T ln 2 (t / t_refresh)",
       {{"depth", "1", "steps", "derivation steps d"},
        {"temp", "300", "K", "temperature"},
        {"bits", "0", "bits", "stored bits"},
        {"time", "0", "s", "storage duration t"},
        {"t-refresh", "1", "s", "refresh period"}}},
      {"triality",
       "E T / M >= H(Q|K) k_B T ln 2",
       {{"h-residual", "1e6", "bits", "residual entropy H(Q|K)"},
        {"temp", "300", "K", "temperature"},
        {"energy", "0", "J", "strategy energy (0 skips the check)"},
        {"time", "0", "s", "strategy time"},
        {"storage", "0", "bits", "strategy storage"}}},
      {"capacity",
       "min carrier = max(0, log2 |O| - E / (k_B T ln 2));  max I = E / (k_B T ln 2)",
       {{"states", "1e6", "states", "ontology states |O|"},
        {"energy", "0", "J", "energy budget"},
        {"temp", "300", "K", "temperature"}}},
      {"amortized",
       "cost = storage / f + h_derive",
       {{"storage", "100", "nats", "storage cost"},
        {"freq", "1", "", "access probability, or access count with --count 1"},
        {"h-derive", "0", "nats", "per-access derivation entropy"},
        {"count", "0", "", "1 to read --freq as an absolute access count"}}},
      {"multi-cost",
       "correct = S / N + sum f h;  naive = S |Q| + sum f h",
       {{"storage", "100", "bits", "storage S"},
        {"accesses", "1000", "accesses", "total accesses N"},
        {"probs", "0.5,0.3,0.2", "", "query probabilities"},
        {"costs", "10,20,30", "bits", "per-query derivation costs"}}},
      {"alpha-critical",
       "alpha_c = H(Q) / (E[depth] ln 2)",
       {{"entropy", "1e6", "bits", "query entropy H(Q)"}, {"mean-depth", "5", "steps", "mean logical depth"}}},
      {"entropy-production",
       "dS >= I(S;q) / T",
       {{"mi", "1", "nats", "mutual information I(S;q)"}, {"temp", "300", "K", "temperature"}}},
  };
  return specs;
}

const CalcSpec& calc_spec(const std::string& sub) {
  for (const auto& s : calc_specs())
    if (s.name == sub) return s;
  throw CalcUsageError("unknown calc subcommand '" + sub + "'");
}

namespace {

double parse_double(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw CalcUsageError("--" + name + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& name, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(name, item));
  if (out.empty()) throw CalcUsageError("--" + name + " needs at least one value");
  return out;
}

}  // namespace

CalcRecord run_calc(const std::string& sub, const std::map<std::string, std::string>& args) {
  const CalcSpec& spec = calc_spec(sub);
  std::map<std::string, std::string> values;
  for (const auto& a : spec.args) values[a.name] = a.default_value;
  for (const auto& [k, v] : args) {
    if (!values.count(k)) throw CalcUsageError("calc " + sub + ": unknown option --" + k);
    values[k] = v;
  }

  CalcRecord r;
  r.sub = sub;
  r.formula = spec.formula;
  auto num = [&](const std::string& name) {
    const double v = parse_double(name, values.at(name));
    for (const auto& a : spec.args)
      if (a.name == name) r.inputs.push_back({name, v, a.unit});
    return v;
  };
  auto thermo_at = [](double temp) {
    ThermoParams p;
    p.temperature = temp;
    p.validate();
    return p;
  };

  if (sub == "critical-storage") {
    const double h = num("h-total"), e = num("energy"), hr = num("h-residual");
    const auto p = thermo_at(num("temp"));
    r.outputs.push_back({"m_critical", critical_storage(h, e, hr, p), "bits"});
  } else if (sub == "critical-frequency") {
    const double m = num("atoms"), c = num("c");
    r.outputs.push_back({"f_c", critical_frequency(m, c), "accesses"});
  } else if (sub == "landauer") {
    const double d = num("depth");
    ThermoParams p = thermo_at(num("temp"));
    const double bits = num("bits"), t = num("time");
    p.t_refresh = num("t-refresh");
    r.outputs.push_back({"compute_energy", landauer_compute_energy(d, p), "J"});
    r.outputs.push_back({"storage_energy", storage_maintenance_energy(bits, t, p), "J"});
    r.outputs.push_back({"unit_energy", p.landauer_unit(), "J/bit"});
  } else if (sub == "triality") {
    const double hr = num("h-residual");
    const auto p = thermo_at(num("temp"));
    const double e = num("energy"), t = num("time"), s = num("storage");
    r.outputs.push_back({"bound", hr * p.landauer_unit(), "J*s/bit"});
    if (s > 0.0) {
      const auto chk = triality_check(e, t, s, hr, p);
      r.outputs.push_back({"product", chk.product, "J*s/bit"});
      r.outputs.push_back({"satisfied", chk.satisfied ? 1.0 : 0.0, "bool"});
    }
  } else if (sub == "capacity") {
    const double states = num("states"), e = num("energy");
    const auto p = thermo_at(num("temp"));
    const auto b = capacity_bounds(states, e, p);
    r.outputs.push_back({"min_carrier", b.min_carrier_bits, "bits"});
    r.outputs.push_back({"max_mutual_info", b.max_mutual_info_bits, "bits"});
  } else if (sub == "amortized") {
    const double s = num("storage"), f = num("freq"), h = num("h-derive"), count = num("count");
    const double cost = count != 0.0 ? amortized_access_cost_by_count(s, f, h) : amortized_access_cost(s, f, h);
    r.outputs.push_back({"cost", cost, "nats/access"});
  } else if (sub == "multi-cost") {
    const double s = num("storage"), n = num("accesses");
    if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::uint64_t>(n)))
      throw CalcUsageError("--accesses must be a positive integer");
    const auto probs = parse_list("probs", values.at("probs"));
    const auto costs = parse_list("costs", values.at("costs"));
    if (probs.size() != costs.size()) throw CalcUsageError("--probs and --costs must have the same length");
    const auto m = multi_query_costs(s, static_cast<std::uint64_t>(n), probs, costs);
    r.outputs.push_back({"expected_h_derive", m.expected_h_derive, "bits/access"});
    r.outputs.push_back({"expected_correct", m.expected_correct, "bits/access"});
    r.outputs.push_back({"naive_invalid", m.naive_invalid, "bits/access"});
    r.outputs.push_back({"ratio", m.ratio, "x"});
  } else if (sub == "alpha-critical") {
    const double h = num("entropy"), d = num("mean-depth");
    r.outputs.push_back({"alpha_c", phase_alpha_critical(h, d), ""});
  } else if (sub == "entropy-production") {
    const double mi = num("mi");
    const auto p = thermo_at(num("temp"));
    r.outputs.push_back({"delta_s_min", entropy_production_min(mi, p), "nats/K"});
  }
  return r;
}

std::string format_calc(const CalcRecord& record) {
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  std::string out = "calc " + record.sub + "\n";
  out += "formula: " + record.formula + "\n";
  for (const auto& in : record.inputs)
    out += "input  " + in.name + " = " + fmt(in.value) + (in.unit.empty() ? "" : " [" + in.unit + "]") + "\n";
  for (const auto& o : record.outputs)
    out += "result " + o.name + " = " + fmt(o.value) + (o.unit.empty() ? "" : " [" + o.unit + "]") + "\n";
  return out;
}

}  // namespace derivd
