#include "uam/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace uam::mission {

namespace {

struct KindName {
  std::string_view name;
  SegmentKind kind;
};

constexpr KindName kKindNames[] = {
    {"taxi_out", SegmentKind::TaxiOut},
    {"vertical_climb", SegmentKind::VerticalClimb},
    {"transition", SegmentKind::Transition},
    {"cruise_climb", SegmentKind::CruiseClimb},
    {"cruise", SegmentKind::Cruise},
    {"cruise_descent", SegmentKind::CruiseDescent},
    {"re_transition", SegmentKind::ReTransition},
    {"vertical_descent", SegmentKind::VerticalDescent},
    {"loiter", SegmentKind::Loiter},
    {"taxi_in", SegmentKind::TaxiIn},
};

}  // namespace

std::string_view to_string(SegmentKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "?";
}

std::optional<SegmentKind> segment_kind_from_string(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (entry.name == name) return entry.kind;
  }
  return std::nullopt;
}

double Flight::duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double Flight::distance() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.distance;
  return total;
}

double MissionProfile::total_distance() const {
  double total = 0.0;
  for (const auto& f : flights) total += f.distance();
  return total;
}

double MissionProfile::total_duration() const {
  double total = 0.0;
  for (const auto& f : flights) total += f.duration();
  return total;
}

namespace {

// controllers of the main rotor drive units, with their rotor and sibling
struct MainUnit {
  std::string unit;
  std::string controller;
  std::string rotor;
};

std::vector<MainUnit> main_units(const Architecture& arch) {
  std::vector<MainUnit> out;
  for (const auto& rotor : arch.rotors) {
    for (const auto& uid : rotor.units) {
      const DriveUnit* unit = arch.find_unit(uid);
      if (unit == nullptr) {
        throw MissionError("unknown drive unit '" + uid + "' in rotor '" +
                           rotor.rotor_id + "'");
      }
      out.push_back({uid, unit->controller, rotor.rotor_id});
    }
  }
  return out;
}

const PowerFeed& feed_for(const Architecture& arch, const std::string& controller) {
  auto it = arch.allocation.feeds.find(controller);
  if (it == arch.allocation.feeds.end()) {
    throw MissionError("controller '" + controller + "' has no power allocation");
  }
  return it->second;
}

// rotors are paired by declaration order: 0<->1, 2<->3
std::string opposite_rotor(const Architecture& arch, const std::string& rotor_id) {
  for (size_t i = 0; i < arch.rotors.size(); ++i) {
    if (arch.rotors[i].rotor_id == rotor_id) {
      size_t opp = i ^ 1u;
      if (opp >= arch.rotors.size()) {
        throw MissionError("rotor '" + rotor_id + "' has no opposite rotor");
      }
      return arch.rotors[opp].rotor_id;
    }
  }
  throw MissionError("unknown rotor '" + rotor_id + "'");
}

}  // namespace

namespace {

struct Survivor {
  std::string controller;
  double power = 0.0;
  std::vector<std::string> choices;  // primary first, then usable alternate
};

// Exhaustive primary/alternate selection minimizing the highest pack load.
// At most 2^8 combinations; ties go to the combination using the fewest and
// earliest alternates, so unaffected controllers stay on their primaries
// whenever that is already optimal.
void balance(std::vector<Survivor>& survivors, Reconfiguration& out) {
  std::sort(survivors.begin(), survivors.end(),
            [](const Survivor& a, const Survivor& b) {
              return a.controller < b.controller;
            });
  std::vector<size_t> pick(survivors.size(), 0);
  std::vector<size_t> best;
  double best_max = std::numeric_limits<double>::infinity();
  for (;;) {
    std::map<std::string, double> load;
    for (size_t i = 0; i < survivors.size(); ++i) {
      load[survivors[i].choices[pick[i]]] += survivors[i].power;
    }
    double worst = 0.0;
    for (const auto& [b, p] : load) worst = std::max(worst, p);
    if (worst < best_max - 1e-9) {
      best_max = worst;
      best = pick;
    }
    size_t i = survivors.size();
    while (i > 0) {
      --i;
      if (++pick[i] < survivors[i].choices.size()) break;
      pick[i] = 0;
      if (i == 0) {
        for (size_t j = 0; j < survivors.size(); ++j) {
          out.assignment[survivors[j].controller] = survivors[j].choices[best[j]];
          out.unit_power[survivors[j].controller] = survivors[j].power;
        }
        return;
      }
    }
    if (survivors.empty()) return;
  }
}

}  // namespace

Reconfiguration reconfigure(const Architecture& arch, const FailureScenario& scenario,
                            const EmergencyPolicy& policy) {
  Reconfiguration out;
  auto units = main_units(arch);
  std::string failed_battery;
  std::string failed_rotor;
  std::string opposite;

  switch (scenario.kind) {
    case FailureKind::DriveUnitLoss: {
      bool found = false;
      for (const auto& u : units) {
        if (u.unit == scenario.target) found = true;
      }
      if (!found) {
        throw MissionError("drive unit '" + scenario.target + "' not found");
      }
      break;
    }
    case FailureKind::BatteryLoss:
      failed_battery = scenario.target;
      break;
    case FailureKind::RotorLoss:
      failed_rotor = scenario.target;
      opposite = opposite_rotor(arch, scenario.target);
      out.push_power = policy.push_power;
      out.speed_override = policy.rotor_out_speed;
      break;
  }

  std::vector<Survivor> survivors;
  for (const auto& u : units) {
    if (u.unit == scenario.target && scenario.kind == FailureKind::DriveUnitLoss) {
      out.shutdown_units.insert(u.unit);
      out.unit_power[u.controller] = 0.0;
      continue;
    }
    if (u.rotor == failed_rotor || u.rotor == opposite) {
      out.shutdown_units.insert(u.unit);
      out.unit_power[u.controller] = 0.0;
      continue;
    }
    Survivor s;
    s.controller = u.controller;
    // a unit left alone on its rotor carries the whole rotor load
    bool alone = false;
    if (scenario.kind == FailureKind::DriveUnitLoss) {
      for (const auto& v : units) {
        if (v.rotor == u.rotor && v.unit == scenario.target) alone = true;
      }
    }
    s.power = alone || scenario.kind == FailureKind::RotorLoss
                  ? policy.single_unit_power
                  : policy.unit_power;
    const PowerFeed& feed = feed_for(arch, u.controller);
    if (feed.primary != failed_battery) s.choices.push_back(feed.primary);
    // a drive-unit loss leaves the electrical system intact: everyone stays
    // on the primary feed
    if (scenario.kind != FailureKind::DriveUnitLoss && !feed.alternate.empty() &&
        feed.alternate != failed_battery && feed.alternate != feed.primary) {
      s.choices.push_back(feed.alternate);
    }
    if (s.choices.empty()) {
      throw MissionError("controller '" + u.controller +
                         "' has no usable battery after losing '" + failed_battery +
                         "'");
    }
    survivors.push_back(std::move(s));
  }
  balance(survivors, out);
  return out;
}

namespace {

class Accumulator {
 public:
  Accumulator(const Architecture& arch, const SimOptions& options)
      : options_(options) {
    for (const auto& b : arch.main_batteries) trace(b);
    if (!arch.push_battery.empty()) trace(arch.push_battery);
  }

  void add_interval(double t0, double t1,
                    const std::map<std::string, double>& pack_power) {
    if (t1 <= t0) return;
    double dt_h = (t1 - t0) / 3600.0;
    for (auto& [id, tr] : traces_) {
      double p = 0.0;
      if (auto it = pack_power.find(id); it != pack_power.end()) p = it->second;
      auto avail = options_.pack_available_w.find(id);
      if (avail != options_.pack_available_w.end() && p > avail->second * (1 + 1e-9)) {
        std::ostringstream msg;
        msg << "pack '" << id << "' demand " << p / 1e3 << " kW exceeds available "
            << avail->second / 1e3 << " kW at t=" << t0 << " s";
        throw MissionError(msg.str());
      }
      tr.samples.push_back({t0, p, tr.energy});
      tr.energy += p * dt_h;
      tr.peak_power = std::max(tr.peak_power, p);
    }
    end_ = t1;
  }

  SimResult finish() {
    SimResult out;
    for (auto& [id, tr] : traces_) {
      auto cap = options_.pack_capacity_wh.find(id);
      if (cap != options_.pack_capacity_wh.end() && cap->second > 0.0) {
        tr.soc = std::clamp(1.0 - tr.energy / cap->second, 0.0, 1.0);
      }
      out.packs.emplace(id, std::move(tr));
    }
    out.end_time = end_;
    return out;
  }

 private:
  PackTrace& trace(const std::string& id) {
    auto [it, inserted] = traces_.emplace(id, PackTrace{});
    if (inserted) it->second.id = id;
    return it->second;
  }

  const SimOptions& options_;
  std::map<std::string, PackTrace> traces_;
  double end_ = 0.0;
};

std::map<std::string, double> normal_pack_power(const Architecture& arch,
                                                const Segment& seg) {
  std::map<std::string, double> out;
  for (const auto& u : main_units(arch)) {
    out[feed_for(arch, u.controller).primary] += seg.unit_power;
  }
  if (!arch.push_battery.empty()) out[arch.push_battery] += seg.push_power;
  return out;
}

}  // namespace

SimResult simulate(const MissionProfile& profile, const Architecture& arch,
                   const std::optional<FailureScenario>& scenario,
                   const SimOptions& options) {
  double onset = scenario ? scenario->onset : -1.0;
  if (scenario && (onset < 0.0 || onset > profile.total_duration())) {
    throw MissionError("failure onset outside the mission span");
  }

  Accumulator acc(arch, options);
  double t = 0.0;
  bool failed = false;
  Reconfiguration reconfig;

  for (size_t f = 0; f < profile.flights.size() && !failed; ++f) {
    const Flight& flight = profile.flights[f];
    for (size_t s = 0; s < flight.segments.size(); ++s) {
      const Segment& seg = flight.segments[s];
      double seg_end = t + seg.duration;
      if (!scenario || onset >= seg_end) {
        acc.add_interval(t, seg_end, normal_pack_power(arch, seg));
        t = seg_end;
        continue;
      }
      // failure inside this segment: normal up to onset, then finish the
      // flight under the reconfigured state
      acc.add_interval(t, onset, normal_pack_power(arch, seg));
      t = onset;
      reconfig = reconfigure(arch, *scenario, options.policy);
      failed = true;

      std::map<std::string, double> main_load;
      for (const auto& [mc, power] : reconfig.unit_power) {
        if (power > 0.0) main_load[reconfig.assignment.at(mc)] += power;
      }

      double frac_left = seg.duration > 0.0 ? (seg_end - onset) / seg.duration : 0.0;
      for (size_t r = s; r < flight.segments.size(); ++r) {
        const Segment& rest = flight.segments[r];
        if (rest.kind == SegmentKind::Loiter || rest.kind == SegmentKind::TaxiIn) {
          continue;  // dropped after a failure; land at the destination
        }
        double frac = r == s ? frac_left : 1.0;
        double duration = rest.duration * frac;
        double distance = rest.distance * frac;
        if (reconfig.speed_override && distance > 0.0 && rest.duration > 0.0) {
          // ground speed capped at the rotor-out limit; slower segments
          // (the transitions) keep their normal timing
          double speed = std::min(rest.distance / rest.duration,
                                  *reconfig.speed_override);
          duration = distance / speed;
        }
        std::map<std::string, double> load = main_load;
        if (!arch.push_battery.empty()) {
          load[arch.push_battery] = reconfig.speed_override
                                        ? reconfig.push_power
                                        : rest.push_power;
        }
        acc.add_interval(t, t + duration, load);
        t += duration;
      }
      break;  // later flights are not flown
    }
  }
  return acc.finish();
}

EtpResult equal_time_point(const MissionProfile& profile, size_t flight_index) {
  if (flight_index >= profile.flights.size()) {
    throw MissionError("no such flight");
  }
  const Flight& flight = profile.flights[flight_index];
  double total = flight.distance();
  if (total <= 0.0) throw MissionError("flight has no distance-covering segments");
  double half = total / 2.0;

  double start = 0.0;
  for (size_t f = 0; f < flight_index; ++f) start += profile.flights[f].duration();

  double covered = 0.0;
  double elapsed = 0.0;
  for (const auto& seg : flight.segments) {
    if (covered + seg.distance >= half && seg.distance > 0.0) {
      double within = (half - covered) / (seg.distance / seg.duration);
      EtpResult out;
      out.flight_time = elapsed + within;
      out.mission_time = start + out.flight_time;
      return out;
    }
    covered += seg.distance;
    elapsed += seg.duration;
  }
  throw MissionError("equal time point not reached");
}

double reserve_endurance(double remaining_wh, double draw_w) {
  if (draw_w <= 0.0) throw MissionError("reserve_endurance: draw must be > 0");
  return remaining_wh / draw_w * 60.0;
}

}  // namespace uam::mission
