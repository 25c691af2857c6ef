#ifndef FIELDCALC_NETWORK_HPP
#define FIELDCALC_NETWORK_HPP

#include <map>
#include <optional>
#include <vector>

#include "fieldcalc/device.hpp"
#include "fieldcalc/scenario.hpp"

namespace fieldcalc {

struct NetEnv {
  Topology topology;
  std::map<DeviceId, SensorState> sensors;
};

struct StoredTree {
  TreePtr tree;
  Timestamp time;
};

// Per device: the latest tree received from each neighbour, with its time.
using StatusField = std::map<DeviceId, std::map<DeviceId, StoredTree>>;

struct NetConfig {
  NetEnv env;
  StatusField status;
  Timestamp clock;
};

// Drops trees older than now - decay.
StatusField filter_old(const StatusField& status, Timestamp now, Timestamp decay);
VTEnv aligned_env(const std::map<DeviceId, StoredTree>& stored);

// Environment change: status becomes (devices -> empty)[status].
NetConfig env_change(const NetConfig& cfg, NetEnv env);

struct FireResult {
  NetConfig config;
  TreePtr tree;
  std::vector<DeviceId> env_domain;
};

// One fire of `device` at `now`: evaluate main against the filtered
// environment, then deliver the tree to every neighbour (self included).
FireResult fire(const NetConfig& cfg, DeviceId device, const Program& program, Timestamp now,
                Timestamp decay, const EvalOptions& opts = {});

struct FireRecord {
  Timestamp t;
  DeviceId device;
  TreePtr tree;
  std::vector<DeviceId> env_domain;
};

struct FireTrace {
  std::vector<FireRecord> fires;
};

struct RunOptions {
  std::int64_t fuel = kDefaultFuel;
  std::optional<std::uint64_t> seed;
};

// nbr-range reading of `device` at `now` given the senders' times:
// distance from the device's position now to each sender's position at
// its send time; self is 0.
NbrField nbr_range_reading(const Scenario& s, DeviceId device, Timestamp now,
                           const std::map<DeviceId, Timestamp>& senders);

FireTrace run_scenario(const Scenario& s, const Program& program, const RunOptions& opts = {});

}  // namespace fieldcalc

#endif
