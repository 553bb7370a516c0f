#pragma once

// Power and energy budget of a chain/oscillator network. Supply powers are
// treated as delivered powers (amplifier efficiency 1).

#include <cstddef>
#include <string>
#include <vector>

namespace spinrf {

struct EnergyConfig {
  std::size_t n_pre = 1;     // N, inputs per chain
  std::size_t m_post = 1;    // M, chains (outputs) in the layer
  double k_sd = 1e4;         // uV/uW, numerically equal to V/W
  double v_min = 1e-3;       // V, smallest readable rectified voltage
  double r_synapse = 2.5e3;  // Ohm
  double r_neuron = 2.5e3;   // Ohm
  double i_th = 1e-5;        // A
  double a_range = 2.0;      // neuron drive range in units of I_th
  double f_op = 1e9;         // Hz
  double periods_to_settle = 100.0;

  void validate() const;  // DomainError unless all positive (a_range >= 0)
};

// Current each input amplifier sends down a chain so that a synapse of
// sensitivity K_SD, fed 1/N of the power, still produces V_min.
double chain_input_current(const EnergyConfig& cfg);

// Rectified voltage of one resonator fed current i on resistance R.
double rectified_voltage(const EnergyConfig& cfg, double i);

// Power from one input amplifier driving M chains in parallel:
// (R N / M) (M I_chain)^2.
double input_amplifier_power(const EnergyConfig& cfg);

struct SynapsePower {
  double per_synapse = 0.0;  // W
  double total = 0.0;        // W, M N synapses
};
SynapsePower synaptic_supply_power(const EnergyConfig& cfg);

struct NeuronPower {
  double per_neuron = 0.0;  // W
  double total = 0.0;       // W, M neurons
};
NeuronPower neuron_supply_power(const EnergyConfig& cfg);

struct OperationEnergy {
  double t_op = 0.0;       // s
  double e_synapse = 0.0;  // J
  double e_neuron = 0.0;   // J
};
OperationEnergy operation_energy(const EnergyConfig& cfg);

struct LayerBudget {
  std::size_t n_pre = 0;
  std::size_t m_post = 0;
  double chain_current = 0.0;  // A
  double synaptic_power = 0.0; // W
  double neuron_power = 0.0;   // W
};

struct Baseline {
  std::string name;
  double power = 0.0;  // W
};

struct EnergyBudget {
  std::vector<LayerBudget> layers;
  std::size_t n_synapses = 0;
  std::size_t n_neurons = 0;
  double per_synapse_power = 0.0;
  double per_neuron_power = 0.0;
  double t_op = 0.0;
  double e_synapse = 0.0;
  double e_neuron = 0.0;
  double synaptic_total = 0.0;  // excludes neurons; the usual headline figure
  double neuron_total = 0.0;
  double grand_total = 0.0;
  double energy_per_inference = 0.0;  // J, grand_total * t_op
  std::vector<Baseline> baselines;
  double baseline_total = 0.0;
  double ratio_vs_baseline = 0.0;  // baseline_total / synaptic_total
};

std::vector<Baseline> default_baselines();  // 45 W digitizer + 100 W processor

// sizes = {inputs, hidden..., outputs}; every non-input layer is counted as
// neurons. Device parameters come from cfg (its n_pre/m_post are ignored).
EnergyBudget network_budget(const std::vector<std::size_t>& sizes, const EnergyConfig& cfg,
                            const std::vector<Baseline>& baselines = default_baselines());

std::string budget_to_json(const EnergyBudget& b, const EnergyConfig& cfg);
std::string budget_to_table(const EnergyBudget& b);

}  // namespace spinrf
