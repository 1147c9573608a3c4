#include "uam/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace uam::thermal {

int Network::add_node(std::string id, double capacity_j_per_k, double initial_c) {
  if (!(capacity_j_per_k > 0.0)) {
    throw ThermalError("node '" + id + "': capacity must be > 0");
  }
  nodes_.push_back({std::move(id), capacity_j_per_k, initial_c, initial_c});
  return static_cast<int>(nodes_.size()) - 1;
}

int Network::add_conductance(int a, int b, double g) {
  if (a < 0 || a >= static_cast<int>(nodes_.size()) ||
      (b != kAmbient && (b < 0 || b >= static_cast<int>(nodes_.size())))) {
    throw ThermalError("conductance endpoints out of range");
  }
  if (g < 0.0) throw ThermalError("conductance must be >= 0");
  links_.push_back({a, b, g});
  return static_cast<int>(links_.size()) - 1;
}

void Network::set_conductance(int link, double g) {
  if (link < 0 || link >= static_cast<int>(links_.size())) {
    throw ThermalError("no such link");
  }
  if (g < 0.0) throw ThermalError("conductance must be >= 0");
  links_[static_cast<size_t>(link)].g = g;
}

int Network::add_loop(Loop loop) {
  if (!(loop.mdot > 0.0) || !(loop.cp > 0.0)) {
    throw ThermalError("coolant loop needs mdot > 0 and cp > 0");
  }
  if (!(loop.effectiveness > 0.0 && loop.effectiveness <= 1.0)) {
    throw ThermalError("exchanger effectiveness outside (0,1]");
  }
  for (const auto& pass : loop.passes) {
    if (pass.node < 0 || pass.node >= static_cast<int>(nodes_.size())) {
      throw ThermalError("loop pass node out of range");
    }
    if (pass.g < 0.0) throw ThermalError("loop pass conductance must be >= 0");
  }
  loops_.push_back(std::move(loop));
  loop_inlets_.emplace_back(loops_.back().passes.size(),
                            std::numeric_limits<double>::quiet_NaN());
  return static_cast<int>(loops_.size()) - 1;
}

double Network::stability_limit() const {
  std::vector<double> total_g(nodes_.size(), 0.0);
  for (const auto& link : links_) {
    total_g[static_cast<size_t>(link.a)] += link.g;
    if (link.b != kAmbient) total_g[static_cast<size_t>(link.b)] += link.g;
  }
  for (const auto& loop : loops_) {
    if (!loop.active) continue;
    for (const auto& pass : loop.passes) {
      total_g[static_cast<size_t>(pass.node)] += pass.g;
    }
  }
  double limit = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (total_g[i] > 0.0) limit = std::min(limit, nodes_[i].capacity / total_g[i]);
  }
  return limit;
}

void Network::step(double dt, const std::vector<double>& q_in) {
  if (!(dt > 0.0)) throw ThermalError("dt must be > 0");
  if (q_in.size() != nodes_.size()) {
    throw ThermalError("q_in size does not match node count");
  }
  double limit = stability_limit();
  if (dt >= limit) {
    throw ThermalError("dt " + std::to_string(dt) +
                       " s violates the stability bound " + std::to_string(limit) +
                       " s; reduce dt");
  }

  std::vector<double> q_net = q_in;
  std::vector<double> q_out(nodes_.size(), 0.0);

  for (const auto& link : links_) {
    double tb = link.b == kAmbient ? ambient_ : nodes_[static_cast<size_t>(link.b)].temperature;
    double q = link.g * (nodes_[static_cast<size_t>(link.a)].temperature - tb);
    q_net[static_cast<size_t>(link.a)] -= q;
    q_out[static_cast<size_t>(link.a)] += q;
    if (link.b == kAmbient) {
      rejected_ += q * dt;
    } else {
      q_net[static_cast<size_t>(link.b)] += q;
      q_out[static_cast<size_t>(link.b)] -= q;
    }
  }

  for (size_t li = 0; li < loops_.size(); ++li) {
    Loop& loop = loops_[li];
    if (!loop.active || loop.passes.empty()) continue;
    double mc = loop.mdot * loop.cp;
    // coolant inlet at each pass is affine in the exchanger outlet T0:
    // in = alpha + beta T0; extracting g (T_node - in) adds to the stream
    double alpha = 0.0, beta = 1.0;
    for (const auto& pass : loop.passes) {
      double tn = nodes_[static_cast<size_t>(pass.node)].temperature;
      // in_next = in + g (T_n - in)/mc
      double k = pass.g / mc;
      alpha = alpha + k * (tn - alpha);
      beta = beta * (1.0 - k);
    }
    // closure: T0 = (1-eps)(alpha + beta T0) + eps T_amb
    double eps = loop.effectiveness;
    double denom = 1.0 - (1.0 - eps) * beta;
    double t0 = ((1.0 - eps) * alpha + eps * ambient_) / denom;
    double in = t0;
    for (size_t p = 0; p < loop.passes.size(); ++p) {
      const auto& pass = loop.passes[p];
      loop_inlets_[li][p] = in;
      double tn = nodes_[static_cast<size_t>(pass.node)].temperature;
      double q = pass.g * (tn - in);
      q_net[static_cast<size_t>(pass.node)] -= q;
      q_out[static_cast<size_t>(pass.node)] += q;
      in += q / mc;
    }
    // closure makes rejected heat equal the sum extracted exactly
    rejected_ += eps * mc * (in - ambient_) * dt;
  }

  for (size_t i = 0; i < nodes_.size(); ++i) {
    injected_ += q_in[i] * dt;
    nodes_[i].temperature += q_net[i] * dt / nodes_[i].capacity;
  }
  time_ += dt;
  last_q_in_ = q_in;
  last_q_out_ = std::move(q_out);
}

const std::string& Network::id(int node) const {
  return nodes_.at(static_cast<size_t>(node)).id;
}

double Network::temperature(int node) const {
  return nodes_.at(static_cast<size_t>(node)).temperature;
}

void Network::set_temperature(int node, double c) {
  nodes_.at(static_cast<size_t>(node)).temperature = c;
}

double Network::capacity(int node) const {
  return nodes_.at(static_cast<size_t>(node)).capacity;
}

double Network::loop_inlet(int index, size_t pass) const {
  return loop_inlets_.at(static_cast<size_t>(index)).at(pass);
}

double Network::last_q_in(int node) const {
  if (last_q_in_.empty()) return 0.0;
  return last_q_in_.at(static_cast<size_t>(node));
}

double Network::last_q_out(int node) const {
  if (last_q_out_.empty()) return 0.0;
  return last_q_out_.at(static_cast<size_t>(node));
}

double Network::stored_delta() const {
  double total = 0.0;
  for (const auto& n : nodes_) total += n.capacity * (n.temperature - n.initial);
  return total;
}

namespace {

// fixed drive-loop layout: nodes mc1, mc2, motor1, motor2, coolant;
// links 0-3 component air paths, 4 coolant-mass natural loss, 5-8 stagnant
// soak paths; loop 0 is the pumped circuit
struct DriveNetwork {
  Network net;
  std::vector<int> air_links;
  int loop = 0;
};

DriveNetwork build_drive_network(const DriveThermalConfig& c, double ambient) {
  DriveNetwork dn;
  Network& net = dn.net;
  net.set_ambient(ambient);
  int mc1 = net.add_node("mc_1", c.controller_capacity, ambient);
  int mc2 = net.add_node("mc_2", c.controller_capacity, ambient);
  int m1 = net.add_node("motor_1", c.motor_capacity, ambient);
  int m2 = net.add_node("motor_2", c.motor_capacity, ambient);
  int cool = net.add_node("coolant", c.coolant_capacity, ambient);
  for (int node : {mc1, mc2, m1, m2}) {
    dn.air_links.push_back(net.add_conductance(node, Network::kAmbient, c.natural_g));
  }
  net.add_conductance(cool, Network::kAmbient, c.natural_g);
  for (int node : {mc1, mc2, m1, m2}) {
    net.add_conductance(node, cool, c.stagnant_g);
  }
  Network::Loop loop;
  loop.mdot = c.mdot;
  loop.cp = c.cp;
  loop.effectiveness = c.hx_effectiveness;
  loop.passes = {{mc1, c.controller_coolant_g},
                 {mc2, c.controller_coolant_g},
                 {m1, c.motor_coolant_g},
                 {m2, c.motor_coolant_g}};
  dn.loop = net.add_loop(std::move(loop));
  return dn;
}

double air_g(const DriveThermalConfig& c, double base_g, double airspeed) {
  if (airspeed <= 0.0) return c.natural_g;
  return c.natural_g +
         base_g * std::pow(airspeed / c.reference_airspeed, c.air_exponent);
}

class ViolationLog {
 public:
  explicit ViolationLog(std::vector<Violation>& out) : out_(out) {}

  void check(const std::string& limit, const std::string& node, double time,
             double value, double max) {
    if (value <= max) return;
    record(limit, node, time, value);
  }

  void check_low(const std::string& limit, const std::string& node, double time,
                 double value, double min) {
    if (value >= min) return;
    record(limit, node, time, value);
  }

 private:
  void record(const std::string& limit, const std::string& node, double time,
              double value) {
    if (!seen_.insert(limit + "/" + node).second) return;
    out_.push_back({limit, node, time, value});
  }

  std::vector<Violation>& out_;
  std::set<std::string> seen_;
};

}  // namespace

DriveThermalResult simulate_drive_thermal(const std::vector<HeatPhase>& phases,
                                          const DriveThermalConfig& config,
                                          double ambient_c, CoolingMode mode) {
  DriveNetwork dn = build_drive_network(config, ambient_c);
  Network& net = dn.net;
  net.loop(dn.loop).active = mode != CoolingMode::AirOnly;
  bool air = mode != CoolingMode::LiquidOnly;

  DriveThermalResult result;
  ViolationLog log(result.violations);
  for (size_t i = 0; i < net.size(); ++i) {
    result.peak[net.id(static_cast<int>(i))] = net.temperature(static_cast<int>(i));
  }
  result.motor_inlet_peak = -std::numeric_limits<double>::infinity();
  result.controller2_inlet_peak = -std::numeric_limits<double>::infinity();

  double next_sample = 0.0;
  auto record = [&](bool force) {
    if (!force && net.time() < next_sample) return;
    next_sample = net.time() + config.sample_interval;
    for (size_t i = 0; i < net.size(); ++i) {
      int node = static_cast<int>(i);
      result.traces[net.id(node)].push_back(
          {net.time(), net.temperature(node), net.last_q_in(node), net.last_q_out(node)});
    }
  };

  const ThermalLimits& lim = config.limits;
  std::vector<double> q(net.size(), 0.0);
  for (const auto& phase : phases) {
    if (!(phase.duration > 0.0)) continue;
    for (size_t k = 0; k < 4; ++k) {
      double base = k < 2 ? config.controller_air_g : config.motor_air_g;
      net.set_conductance(dn.air_links[k],
                          air ? air_g(config, base, phase.airspeed) : config.natural_g);
    }
    q[0] = q[1] = phase.controller_q;
    q[2] = q[3] = phase.motor_q;
    q[4] = 0.0;
    double remaining = phase.duration;
    while (remaining > 1e-12) {
      double dt = std::min(config.dt, remaining);
      net.step(dt, q);
      remaining -= dt;

      for (int node : {2, 3}) {
        double t = net.temperature(node);
        result.peak[net.id(node)] = std::max(result.peak[net.id(node)], t);
        if (t > lim.motor_max && !result.motor_first_exceedance) {
          result.motor_first_exceedance = net.time();
        }
        log.check("motor-max", net.id(node), net.time(), t, lim.motor_max);
      }
      for (int node : {0, 1}) {
        double t = net.temperature(node);
        result.peak[net.id(node)] = std::max(result.peak[net.id(node)], t);
        log.check("controller-max", net.id(node), net.time(), t, lim.controller_max);
      }
      result.peak["coolant"] = std::max(result.peak["coolant"], net.temperature(4));
      if (net.loop(dn.loop).active) {
        double mc2_in = net.loop_inlet(dn.loop, 1);
        double m1_in = net.loop_inlet(dn.loop, 2);
        result.controller2_inlet_peak = std::max(result.controller2_inlet_peak, mc2_in);
        result.motor_inlet_peak = std::max(result.motor_inlet_peak, m1_in);
        log.check("controller-inlet-max", "mc_2", net.time(), mc2_in,
                  lim.controller_inlet_max);
        log.check("motor-inlet-max", "motor_1", net.time(), m1_in, lim.motor_inlet_max);
      }
      record(false);
    }
  }
  record(true);
  result.network = std::move(net);
  return result;
}

CooldownResult ground_cooldown(Network network, const DriveThermalConfig& config,
                               bool fan_on, double duration_s) {
  // same layout as build_drive_network: links 0-3 are the air paths
  double g = fan_on ? air_g(config, config.motor_air_g, config.fan_airspeed)
                    : config.natural_g;
  for (int link = 0; link < 4; ++link) network.set_conductance(link, g);
  network.loop(0).active = fan_on;

  CooldownResult result;
  ViolationLog log(result.violations);
  const ThermalLimits& lim = config.limits;
  for (size_t i = 0; i < network.size(); ++i) {
    result.peak[network.id(static_cast<int>(i))] =
        network.temperature(static_cast<int>(i));
  }

  double next_sample = network.time();
  std::vector<double> q(network.size(), 0.0);
  double remaining = duration_s;
  while (remaining > 1e-12) {
    double dt = std::min(config.dt, remaining);
    network.step(dt, q);
    remaining -= dt;
    for (size_t i = 0; i < network.size(); ++i) {
      int node = static_cast<int>(i);
      double t = network.temperature(node);
      result.peak[network.id(node)] = std::max(result.peak[network.id(node)], t);
    }
    // the stagnant coolant feeds the controller inlets: same 65 degC limit
    log.check("controller-inlet-max", "coolant", network.time(),
              network.temperature(4), lim.controller_inlet_max);
    if (network.time() >= next_sample) {
      next_sample = network.time() + config.sample_interval;
      for (size_t i = 0; i < network.size(); ++i) {
        int node = static_cast<int>(i);
        result.traces[network.id(node)].push_back({network.time(),
                                                   network.temperature(node),
                                                   network.last_q_in(node),
                                                   network.last_q_out(node)});
      }
    }
  }
  result.final_max = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < network.size(); ++i) {
    result.final_max =
        std::max(result.final_max, network.temperature(static_cast<int>(i)));
  }
  result.network = std::move(network);
  return result;
}

BatteryThermalResult simulate_battery_thermal(const std::vector<BatteryPhase>& powers,
                                              const BatteryThermalConfig& config,
                                              double ambient_c,
                                              BatteryCooling cooling) {
  Network net;
  net.set_ambient(ambient_c);
  int pack = net.add_node("pack", config.capacity, ambient_c);
  net.add_conductance(pack, Network::kAmbient, config.natural_g);
  if (cooling == BatteryCooling::Liquid) {
    Network::Loop loop;
    loop.mdot = config.mdot;
    loop.cp = config.cp;
    loop.effectiveness = config.hx_effectiveness;
    loop.passes = {{pack, config.liquid_g}};
    net.add_loop(std::move(loop));
  }

  BatteryThermalResult result;
  ViolationLog log(result.violations);
  result.peak = ambient_c;
  const ThermalLimits& lim = config.limits;
  double next_sample = 0.0;
  std::vector<double> q(1, 0.0);
  for (const auto& phase : powers) {
    if (!(phase.duration > 0.0)) continue;
    q[0] = config.loss_fraction * phase.power_w;
    double remaining = phase.duration;
    while (remaining > 1e-12) {
      double dt = std::min(config.dt, remaining);
      net.step(dt, q);
      remaining -= dt;
      double t = net.temperature(pack);
      result.peak = std::max(result.peak, t);
      log.check("battery-max", "pack", net.time(), t, lim.battery_max);
      log.check_low("battery-min", "pack", net.time(), t, lim.battery_min);
      if (net.time() >= next_sample) {
        next_sample = net.time() + config.sample_interval;
        result.trace.push_back({net.time(), t, net.last_q_in(pack), net.last_q_out(pack)});
      }
    }
  }
  result.peak_offset = result.peak - ambient_c;
  return result;
}

double max_feasible_ambient(const std::vector<BatteryPhase>& powers,
                            const BatteryThermalConfig& config,
                            BatteryCooling cooling) {
  auto ref = simulate_battery_thermal(powers, config, 25.0, cooling);
  return config.limits.battery_max - ref.peak_offset;
}

void write_trace_csv(std::ostream& out,
                     const std::map<std::string, std::vector<TraceSample>>& traces) {
  out << "time_s,node_id,temp_c,q_in_w,q_out_w\n";
  char buf[160];
  for (const auto& [id, samples] : traces) {
    for (const auto& s : samples) {
      std::snprintf(buf, sizeof buf, "%.6g,%s,%.6g,%.6g,%.6g\n", s.time, id.c_str(),
                    s.temp_c, s.q_in_w, s.q_out_w);
      out << buf;
    }
  }
}

}  // namespace uam::thermal
