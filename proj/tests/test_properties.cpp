#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "uam/adl.hpp"
#include "uam/model.hpp"
#include "uam/report.hpp"
#include "uam/thermal.hpp"

// Cross-module property suite: every check here is self-verifying and
// independent of the calibration anchors, so it stays green under model
// retuning as long as the physics and algebra are right.

using namespace uam;

namespace {

std::string bundled_model() { return std::string(UAM_MODEL_DIR) + "/horizonuam.adl"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Seeded generator mirroring the fta test suite: gates only reference
// earlier nodes, so trees are acyclic by construction.
fta::FaultTree random_tree(std::mt19937_64& rng, int n_events) {
  auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  for (;;) {
    fta::FaultTree t;
    t.id = "rnd";
    std::vector<std::string> pool;
    for (int i = 0; i < n_events; ++i) {
      std::string id = "e" + std::to_string(i);
      t.events[id] = {id, 0.0, 1.0, 0.02 + 0.4 * uniform()};
      pool.push_back(id);
    }
    int n_gates = 2 + static_cast<int>(rng() % 3);
    for (int g = 0; g < n_gates; ++g) {
      fta::Gate gate;
      gate.id = "g" + std::to_string(g);
      int fanout = 2 + static_cast<int>(rng() % 2);
      for (int c = 0; c < fanout; ++c) {
        gate.children.push_back(pool[rng() % pool.size()]);
      }
      std::sort(gate.children.begin(), gate.children.end());
      gate.children.erase(std::unique(gate.children.begin(), gate.children.end()),
                          gate.children.end());
      switch (rng() % 3) {
        case 0: gate.op = fta::GateOp::And; break;
        case 1: gate.op = fta::GateOp::Or; break;
        default:
          gate.op = fta::GateOp::KofN;
          gate.k = 1 + static_cast<int>(rng() % gate.children.size());
      }
      t.gates[gate.id] = gate;
      pool.push_back(gate.id);
    }
    t.top = "g" + std::to_string(n_gates - 1);
    try {
      if (fta::minimal_cut_sets(t).size() <= 20) return t;
    } catch (const fta::FtaError&) {
    }
  }
}

const model::Model& bundle() {
  static model::Model m = model::load_file(bundled_model());
  return m;
}

const report::Analysis& analysis() {
  static report::Analysis a = report::analyze(bundle());
  return a;
}

}  // namespace

TEST_CASE("thermal energy balance holds on random networks") {
  std::mt19937_64 rng(20250824);
  auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

  for (int trial = 0; trial < 25; ++trial) {
    thermal::Network net;
    net.set_ambient(15.0 + 20.0 * uniform());
    int n = 3 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      net.add_node("n" + std::to_string(i), 500.0 + 4500.0 * uniform(),
                   20.0 + 60.0 * uniform());
    }
    // spanning chain plus random extra links and a few ambient paths
    for (int i = 1; i < n; ++i) {
      net.add_conductance(i - 1, i, 1.0 + 20.0 * uniform());
    }
    int extras = static_cast<int>(rng() % 4);
    for (int e = 0; e < extras; ++e) {
      int a = static_cast<int>(rng() % n);
      int b = static_cast<int>(rng() % n);
      if (a != b) net.add_conductance(a, b, 1.0 + 10.0 * uniform());
    }
    net.add_conductance(static_cast<int>(rng() % n), thermal::Network::kAmbient,
                        0.5 + 5.0 * uniform());

    // every other trial carries a pumped coolant loop over a node subset
    if (trial % 2 == 0) {
      thermal::Network::Loop loop;
      loop.mdot = 0.05 + 0.2 * uniform();
      loop.cp = 3000.0 + 1500.0 * uniform();
      loop.effectiveness = 0.2 + 0.7 * uniform();
      for (int i = 0; i < n; ++i) {
        if (rng() % 2 == 0) loop.passes.push_back({i, 20.0 + 60.0 * uniform()});
      }
      if (loop.passes.empty()) loop.passes.push_back({0, 40.0});
      net.add_loop(loop);
    }

    double dt = 0.4 * net.stability_limit();
    std::vector<double> q(static_cast<size_t>(n));
    int steps = 200 + static_cast<int>(rng() % 400);
    for (int s = 0; s < steps; ++s) {
      for (auto& qi : q) qi = 3000.0 * uniform();
      net.step(dt, q);
    }

    double balance = net.injected() - net.rejected() - net.stored_delta();
    double scale = std::max(1.0, net.injected());
    CHECK(std::abs(balance) <= 1e-9 * scale);
  }
}

TEST_CASE("fta top probability is monotone in every event") {
  std::mt19937_64 rng(424242);
  for (int i = 0; i < 40; ++i) {
    auto t = random_tree(rng, 7);
    double base = fta::evaluate_top(t);
    for (const auto& [id, ev] : t.events) {
      fta::FaultTree bumped = t;
      double p = *bumped.events[id].fixed_probability;
      bumped.events[id].fixed_probability = std::min(1.0, p * 1.5 + 0.05);
      CHECK(fta::evaluate_top(bumped) >= base - 1e-12);

      fta::FaultTree lowered = t;
      lowered.events[id].fixed_probability = p * 0.5;
      CHECK(fta::evaluate_top(lowered) <= base + 1e-12);
    }
  }

  // the bundled hazard trees obey the same ordering
  for (const auto& tree : bundle().trees) {
    double base = fta::evaluate_top(tree);
    for (const auto& [id, ev] : tree.events) {
      fta::FaultTree bumped = tree;
      bumped.events[id].lambda *= 10.0;
      CHECK(fta::evaluate_top(bumped) >= base - 1e-15);
    }
  }
}

TEST_CASE("parser round trip is a fixpoint on the bundled model") {
  std::string text = read_file(bundled_model());
  auto first = adl::parse(text, "horizonuam.adl");
  REQUIRE(first.ok());

  std::string canonical = adl::serialize(first.document);
  auto second = adl::parse(canonical, "canonical");
  REQUIRE(second.ok());
  CHECK(second.document == first.document);

  // serialization is byte-stable once canonical
  CHECK(adl::serialize(second.document) == canonical);
}

TEST_CASE("reconfiguration never assigns a failed battery") {
  const auto& arch = bundle().architecture;
  std::vector<mission::FailureScenario> scenarios;
  for (const auto& b : arch.main_batteries) {
    scenarios.push_back({mission::FailureKind::BatteryLoss, b, 100.0});
  }
  for (const auto& rotor : arch.rotors) {
    scenarios.push_back({mission::FailureKind::RotorLoss, rotor.rotor_id, 100.0});
    for (const auto& unit : rotor.units) {
      scenarios.push_back({mission::FailureKind::DriveUnitLoss, unit, 100.0});
    }
  }

  for (const auto& scenario : scenarios) {
    auto reconf = mission::reconfigure(arch, scenario);
    for (const auto& [controller, battery] : reconf.assignment) {
      if (scenario.kind == mission::FailureKind::BatteryLoss) {
        CHECK(battery != scenario.target);
      }
      // every assignment lands on a declared main battery
      bool known = std::find(arch.main_batteries.begin(), arch.main_batteries.end(),
                             battery) != arch.main_batteries.end();
      CHECK(known);
    }
  }
}

TEST_CASE("every single-failure scenario is feasible with the sized packs") {
  const auto& a = analysis();
  CHECK(a.infeasible.empty());
  // the sized layouts actually carry the sweep worst cases
  CHECK(a.main_pack.layout.available_power >= a.worst_main_peak_w);
  CHECK(a.main_pack.layout.capacity >= a.main_pack.required_capacity);
  CHECK(a.push_pack.layout.capacity >= a.push_pack.required_capacity);
}
