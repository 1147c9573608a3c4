#pragma once

// Three-flight mission simulation: piecewise-constant per-segment power
// integration per battery pack, equal-time-point computation and failure
// reconfiguration (drive-unit loss, rotor loss, battery-pack loss).

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uam/core.hpp"

namespace uam::mission {

struct MissionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SegmentKind {
  TaxiOut,
  VerticalClimb,
  Transition,
  CruiseClimb,
  Cruise,
  CruiseDescent,
  ReTransition,
  VerticalDescent,
  Loiter,
  TaxiIn,
};

std::string_view to_string(SegmentKind kind);
std::optional<SegmentKind> segment_kind_from_string(std::string_view name);

struct Segment {
  SegmentKind kind = SegmentKind::Cruise;
  double duration = 0.0;    // s
  double distance = 0.0;    // m, 0 for hover/taxi segments
  double speed = 0.0;       // m/s ground speed
  double unit_power = 0.0;  // W electrical per main drive unit
  double push_power = 0.0;  // W electrical, whole push pack
};

struct Flight {
  std::vector<Segment> segments;
  double duration() const;
  double distance() const;
};

struct MissionProfile {
  std::vector<Flight> flights;  // flight 3 carries the loiter reserve
  double total_distance() const;
  double total_duration() const;
};

enum class FailureKind { DriveUnitLoss, RotorLoss, BatteryLoss };

struct FailureScenario {
  FailureKind kind = FailureKind::BatteryLoss;
  std::string target;  // drive unit, rotor or battery id
  double onset = 0.0;  // mission time s
};

// Flat post-failure ratings and the rotor-out speed reduction.
struct EmergencyPolicy {
  double unit_power = 30e3;         // W per remaining main unit
  double single_unit_power = 60e3;  // W for a unit driving its rotor alone
  double push_power = 126e3;        // W push pack after a rotor loss
  double rotor_out_speed = 26.0;    // m/s ground speed after a rotor loss
};

struct Reconfiguration {
  std::map<std::string, std::string> assignment;  // controller -> battery
  std::map<std::string, double> unit_power;       // controller -> W
  std::set<std::string> shutdown_units;           // drive unit ids
  double push_power = 0.0;
  std::optional<double> speed_override;  // m/s, rotor loss only
};

// Post-failure battery assignment and flat power commands. Throws
// MissionError when an affected controller has no usable alternate.
Reconfiguration reconfigure(const Architecture& arch, const FailureScenario& scenario,
                            const EmergencyPolicy& policy = {});

struct PackSample {
  double time = 0.0;    // s, start of the interval
  double power = 0.0;   // W over the interval
  double energy = 0.0;  // Wh cumulative at interval start
};

struct PackTrace {
  std::string id;
  std::vector<PackSample> samples;
  double energy = 0.0;      // Wh total
  double peak_power = 0.0;  // W
  double soc = 1.0;         // end of mission, when capacity known
};

struct SimOptions {
  std::map<std::string, double> pack_capacity_wh;   // for SoC
  std::map<std::string, double> pack_available_w;   // feasibility limit
  EmergencyPolicy policy;
};

struct SimResult {
  std::map<std::string, PackTrace> packs;
  double end_time = 0.0;  // s
};

// Piecewise-constant integration. After a failure the current flight is
// completed to its destination (loiter and taxi-in dropped); later flights
// are not flown. Throws MissionError when a pack's demand exceeds its
// available power.
SimResult simulate(const MissionProfile& profile, const Architecture& arch,
                   const std::optional<FailureScenario>& scenario = std::nullopt,
                   const SimOptions& options = {});

struct EtpResult {
  double mission_time = 0.0;  // s
  double flight_time = 0.0;   // s after flight start
};

// Still-air equal time point: covered distance equals remaining distance.
EtpResult equal_time_point(const MissionProfile& profile, size_t flight_index);

// remaining energy / draw, in minutes.
double reserve_endurance(double remaining_wh, double draw_w);

}  // namespace uam::mission
