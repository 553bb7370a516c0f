#include "spinrf/energy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "spinrf/errors.hpp"

namespace spinrf {

void EnergyConfig::validate() const {
  const bool ok = n_pre > 0 && m_post > 0 && k_sd > 0.0 && v_min > 0.0 && r_synapse > 0.0 &&
                  r_neuron > 0.0 && i_th > 0.0 && a_range >= 0.0 && f_op > 0.0 &&
                  periods_to_settle > 0.0 && std::isfinite(k_sd) && std::isfinite(v_min) &&
                  std::isfinite(r_synapse) && std::isfinite(r_neuron) && std::isfinite(i_th) &&
                  std::isfinite(a_range) && std::isfinite(f_op) && std::isfinite(periods_to_settle);
  if (!ok) throw DomainError("EnergyConfig: parameters must be positive and finite");
}

double chain_input_current(const EnergyConfig& cfg) {
  cfg.validate();
  return std::sqrt(cfg.v_min / (static_cast<double>(cfg.n_pre) * cfg.k_sd * cfg.r_synapse));
}

double rectified_voltage(const EnergyConfig& cfg, double i) {
  return cfg.k_sd * cfg.r_synapse * i * i;
}

double input_amplifier_power(const EnergyConfig& cfg) {
  const double n = static_cast<double>(cfg.n_pre);
  const double m = static_cast<double>(cfg.m_post);
  const double i = chain_input_current(cfg);
  return (cfg.r_synapse * n / m) * (m * i) * (m * i);
}

SynapsePower synaptic_supply_power(const EnergyConfig& cfg) {
  cfg.validate();
  SynapsePower p;
  p.per_synapse = cfg.v_min / cfg.k_sd;
  p.total = static_cast<double>(cfg.m_post) * static_cast<double>(cfg.n_pre) * p.per_synapse;
  return p;
}

NeuronPower neuron_supply_power(const EnergyConfig& cfg) {
  cfg.validate();
  NeuronPower p;
  const double i = cfg.a_range * cfg.i_th;
  p.per_neuron = cfg.r_neuron * i * i;
  p.total = static_cast<double>(cfg.m_post) * p.per_neuron;
  return p;
}

OperationEnergy operation_energy(const EnergyConfig& cfg) {
  cfg.validate();
  OperationEnergy e;
  e.t_op = cfg.periods_to_settle / cfg.f_op;
  e.e_synapse = (cfg.v_min / cfg.k_sd) * e.t_op;
  const double i = cfg.a_range * cfg.i_th;
  e.e_neuron = cfg.r_neuron * i * i * e.t_op;
  return e;
}

std::vector<Baseline> default_baselines() {
  return {{"digitizer", 45.0}, {"processor", 100.0}};
}

EnergyBudget network_budget(const std::vector<std::size_t>& sizes, const EnergyConfig& cfg,
                            const std::vector<Baseline>& baselines) {
  cfg.validate();
  if (sizes.size() < 2) throw DomainError("network_budget: need at least input and output sizes");
  // An empty layer is dropped: {256, 0, 10} is a single 256 -> 10 layer.
  std::vector<std::size_t> live;
  for (std::size_t s : sizes) {
    if (s) live.push_back(s);
  }
  if (live.size() < 2) throw DomainError("network_budget: need at least two non-empty layers");
  EnergyBudget b;
  for (std::size_t l = 1; l < live.size(); ++l) {
    EnergyConfig lc = cfg;
    lc.n_pre = live[l - 1];
    lc.m_post = live[l];
    LayerBudget lb;
    lb.n_pre = lc.n_pre;
    lb.m_post = lc.m_post;
    lb.chain_current = chain_input_current(lc);
    lb.synaptic_power = synaptic_supply_power(lc).total;
    lb.neuron_power = neuron_supply_power(lc).total;
    b.n_synapses += lc.n_pre * lc.m_post;
    b.n_neurons += lc.m_post;
    b.synaptic_total += lb.synaptic_power;
    b.neuron_total += lb.neuron_power;
    b.layers.push_back(lb);
  }
  const auto op = operation_energy(cfg);
  b.per_synapse_power = cfg.v_min / cfg.k_sd;
  b.per_neuron_power = cfg.r_neuron * (cfg.a_range * cfg.i_th) * (cfg.a_range * cfg.i_th);
  b.t_op = op.t_op;
  b.e_synapse = op.e_synapse;
  b.e_neuron = op.e_neuron;
  b.grand_total = b.synaptic_total + b.neuron_total;
  b.energy_per_inference = b.grand_total * b.t_op;
  b.baselines = baselines;
  for (const auto& bl : baselines) b.baseline_total += bl.power;
  b.ratio_vs_baseline = b.synaptic_total > 0.0 ? b.baseline_total / b.synaptic_total : 0.0;
  return b;
}

std::string budget_to_json(const EnergyBudget& b, const EnergyConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = {{"k_sd_uV_per_uW", cfg.k_sd},     {"v_min_V", cfg.v_min},
                 {"r_synapse_ohm", cfg.r_synapse}, {"r_neuron_ohm", cfg.r_neuron},
                 {"i_th_A", cfg.i_th},             {"a_range", cfg.a_range},
                 {"f_op_Hz", cfg.f_op},            {"periods_to_settle", cfg.periods_to_settle}};
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : b.layers) {
    layers.push_back({{"n_pre", l.n_pre},
                      {"m_post", l.m_post},
                      {"chain_current_A", l.chain_current},
                      {"synaptic_power_W", l.synaptic_power},
                      {"neuron_power_W", l.neuron_power}});
  }
  j["layers"] = layers;
  j["n_synapses"] = b.n_synapses;
  j["n_neurons"] = b.n_neurons;
  j["per_synapse_power_W"] = b.per_synapse_power;
  j["per_neuron_power_W"] = b.per_neuron_power;
  j["t_op_s"] = b.t_op;
  j["e_synapse_J"] = b.e_synapse;
  j["e_neuron_J"] = b.e_neuron;
  j["synaptic_total_W"] = b.synaptic_total;
  j["neuron_total_W"] = b.neuron_total;
  j["grand_total_W"] = b.grand_total;
  j["energy_per_inference_J"] = b.energy_per_inference;
  j["headline_total_W"] = b.synaptic_total;
  auto bl = nlohmann::ordered_json::array();
  for (const auto& x : b.baselines) bl.push_back({{"name", x.name}, {"power_W", x.power}});
  j["baselines"] = bl;
  j["baseline_total_W"] = b.baseline_total;
  j["ratio_vs_baseline"] = b.ratio_vs_baseline;
  return j.dump(2);
}

std::string budget_to_table(const EnergyBudget& b) {
  std::ostringstream os;
  char buf[160];
  auto row = [&](const char* name, double v, const char* unit) {
    std::snprintf(buf, sizeof buf, "%-28s %14.6g %s\n", name, v, unit);
    os << buf;
  };
  for (std::size_t i = 0; i < b.layers.size(); ++i) {
    const auto& l = b.layers[i];
    std::snprintf(buf, sizeof buf, "layer %zu: %zu -> %zu  I_chain %.4g A  P_syn %.6g W  P_neu %.6g W\n",
                  i + 1, l.n_pre, l.m_post, l.chain_current, l.synaptic_power, l.neuron_power);
    os << buf;
  }
  row("synapses", static_cast<double>(b.n_synapses), "");
  row("neurons", static_cast<double>(b.n_neurons), "");
  row("power per synapse", b.per_synapse_power * 1e6, "uW");
  row("power per neuron", b.per_neuron_power * 1e6, "uW");
  row("operation time", b.t_op * 1e9, "ns");
  row("energy per synapse op", b.e_synapse * 1e15, "fJ");
  row("energy per neuron op", b.e_neuron * 1e15, "fJ");
  row("synaptic total", b.synaptic_total * 1e3, "mW");
  row("neuron total", b.neuron_total * 1e3, "mW");
  row("grand total", b.grand_total * 1e3, "mW");
  row("energy per inference", b.energy_per_inference * 1e9, "nJ");
  row("baseline total", b.baseline_total, "W");
  row("baseline / synaptic total", b.ratio_vs_baseline, "");
  return os.str();
}

}  // namespace spinrf
