#pragma once

// Lumped-parameter thermal simulation: explicit-Euler node network with
// conduction/convection links and quasi-steady coolant loops, plus the two
// concrete networks built on top of it (rotor drive cooling loop and
// battery pack) with mission-level checks against the temperature limits.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uam::thermal {

struct ThermalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ThermalLimits {
  double motor_max = 120.0;             // degC winding
  double controller_max = 85.0;
  double controller_inlet_max = 65.0;   // coolant entering a controller
  double motor_inlet_max = 50.0;        // coolant entering a motor
  double battery_min = 20.0;
  double battery_max = 40.0;
  double pressure_max_bar = 2.0;
};

// Node network with an implicit infinite-capacity ambient. Coolant loops
// are quasi-steady: the loop temperature is solved in closed form every
// step from the closure condition through the heat exchanger, so extracted
// and rejected heat balance exactly.
class Network {
 public:
  static constexpr int kAmbient = -1;

  struct LoopPass {
    int node = 0;
    double g = 0.0;  // W/K coolant-side conductance at this pass
  };

  struct Loop {
    double mdot = 0.0;           // kg/s
    double cp = 0.0;             // J/(kg K)
    double effectiveness = 0.0;  // heat exchanger, 0..1
    bool active = true;
    std::vector<LoopPass> passes;  // flow order; exchanger closes the loop
  };

  int add_node(std::string id, double capacity_j_per_k, double initial_c);
  // Conduction/convection between two nodes, or a node and kAmbient.
  int add_conductance(int a, int b, double g);
  void set_conductance(int link, double g);
  int add_loop(Loop loop);
  Loop& loop(int index) { return loops_[static_cast<size_t>(index)]; }

  void set_ambient(double c) { ambient_ = c; }
  double ambient() const { return ambient_; }

  // Largest stable explicit-Euler step, min over nodes of C_i / sum G_i.
  double stability_limit() const;
  // One step with per-node heat injection (W). Throws when dt is at or
  // above the stability limit.
  void step(double dt, const std::vector<double>& q_in);

  size_t size() const { return nodes_.size(); }
  const std::string& id(int node) const;
  double temperature(int node) const;
  void set_temperature(int node, double c);
  double capacity(int node) const;
  double time() const { return time_; }

  // Coolant temperature entering pass `pass` of loop `index`, as of the
  // last step. NaN before the first step or while the loop is inactive.
  double loop_inlet(int index, size_t pass) const;

  // Per-node heat flows of the last step (W): injected, and net outflow
  // to other nodes, ambient and coolant.
  double last_q_in(int node) const;
  double last_q_out(int node) const;

  // Energy bookkeeping since construction (J).
  double injected() const { return injected_; }
  double rejected() const { return rejected_; }
  double stored_delta() const;

 private:
  struct NodeState {
    std::string id;
    double capacity = 0.0;
    double temperature = 0.0;
    double initial = 0.0;
  };
  struct Link {
    int a = 0;
    int b = 0;
    double g = 0.0;
  };

  std::vector<NodeState> nodes_;
  std::vector<Link> links_;
  std::vector<Loop> loops_;
  std::vector<std::vector<double>> loop_inlets_;
  std::vector<double> last_q_in_;
  std::vector<double> last_q_out_;
  double ambient_ = 20.0;
  double time_ = 0.0;
  double injected_ = 0.0;
  double rejected_ = 0.0;
};

struct TraceSample {
  double time = 0.0;
  double temp_c = 0.0;
  double q_in_w = 0.0;
  double q_out_w = 0.0;  // to ambient and coolant
};

struct Violation {
  std::string limit;  // e.g. "motor-max"
  std::string node;
  double time = 0.0;
  double value = 0.0;
};

// One piecewise-constant stretch of the mission as seen by a rotor drive
// loop: per-motor and per-controller heat with the cooling airspeed.
struct HeatPhase {
  double duration = 0.0;      // s
  double motor_q = 0.0;       // W per motor
  double controller_q = 0.0;  // W per controller
  double airspeed = 0.0;      // m/s
};

enum class CoolingMode { AirOnly, LiquidOnly, Combined };

// Capacities and conductances are calibration constants: the published
// reference anchors a handful of trajectory points, not component data.
struct DriveThermalConfig {
  double motor_capacity = 3000.0;       // J/K winding + iron per motor
  double controller_capacity = 3500.0;
  double coolant_capacity = 4200.0;     // stagnant fluid + cold plates
  double motor_air_g = 3.8;             // W/K at reference airspeed
  double controller_air_g = 5.0;
  double reference_airspeed = 30.0;     // m/s
  double air_exponent = 0.8;            // forced-convection power law
  double natural_g = 1.2;               // W/K parked, fan off
  double motor_coolant_g = 45.0;        // W/K coolant side
  double controller_coolant_g = 60.0;
  double stagnant_g = 12.0;             // node to coolant mass, pump off
  double mdot = 0.14;                   // kg/s Glysantin G40
  double cp = 3300.0;                   // J/(kg K)
  double hx_effectiveness = 0.42;
  double fan_airspeed = 12.0;           // equivalent airspeed, ground fan
  double dt = 0.25;                     // s
  double sample_interval = 2.0;         // s between recorded samples
  ThermalLimits limits;
};

struct DriveThermalResult {
  std::map<std::string, std::vector<TraceSample>> traces;
  std::map<std::string, double> peak;               // node id -> max degC
  std::optional<double> motor_first_exceedance;     // s, motor limit
  double motor_inlet_peak = 0.0;                    // coolant, degC
  double controller2_inlet_peak = 0.0;
  std::vector<Violation> violations;
  Network network;  // end-of-mission state, input to ground_cooldown
};

// One rotor loop (two controllers then two motors in series, exchanger
// closing the loop) driven by the phase schedule. Limit violations are
// report rows, not errors.
DriveThermalResult simulate_drive_thermal(const std::vector<HeatPhase>& phases,
                                          const DriveThermalConfig& config,
                                          double ambient_c, CoolingMode mode);

struct CooldownResult {
  std::map<std::string, std::vector<TraceSample>> traces;
  std::map<std::string, double> peak;
  double final_max = 0.0;  // hottest node at the end
  std::vector<Violation> violations;
  Network network;
};

// Ground phase from a post-mission state. fan_on keeps pump and fan
// running; otherwise the loop stagnates and heat soaks back.
CooldownResult ground_cooldown(Network network, const DriveThermalConfig& config,
                               bool fan_on, double duration_s);

struct BatteryPhase {
  double duration = 0.0;  // s
  double power_w = 0.0;   // pack electrical draw
};

enum class BatteryCooling { None, Liquid };

struct BatteryThermalConfig {
  double capacity = 100e3;       // J/K per pack
  double loss_fraction = 0.035;  // heat = fraction x pack power
  double natural_g = 5.0;        // W/K uncooled
  double liquid_g = 850.0;       // W/K pack to coolant
  double mdot = 0.0695;          // kg/s glycol-water 20:80
  double cp = 3900.0;            // J/(kg K)
  double hx_effectiveness = 1.0;
  double dt = 1.0;
  double sample_interval = 5.0;
  ThermalLimits limits;
};

struct BatteryThermalResult {
  std::vector<TraceSample> trace;
  double peak = 0.0;         // degC
  double peak_offset = 0.0;  // degC above ambient
  std::vector<Violation> violations;
};

BatteryThermalResult simulate_battery_thermal(const std::vector<BatteryPhase>& powers,
                                              const BatteryThermalConfig& config,
                                              double ambient_c, BatteryCooling cooling);

// Highest ambient keeping the pack at or below the battery limit for the
// given draw profile. The offset above ambient is ambient-independent
// (linear model), so this is limit minus peak offset.
double max_feasible_ambient(const std::vector<BatteryPhase>& powers,
                            const BatteryThermalConfig& config,
                            BatteryCooling cooling);

// time_s,node_id,temp_c,q_in_w,q_out_w rows for external plotting.
void write_trace_csv(std::ostream& out,
                     const std::map<std::string, std::vector<TraceSample>>& traces);

}  // namespace uam::thermal
