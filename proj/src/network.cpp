#include "fieldcalc/network.hpp"

#include <algorithm>
#include <tuple>

namespace fieldcalc {

StatusField filter_old(const StatusField& status, Timestamp now, Timestamp decay) {
  StatusField out;
  for (const auto& [d, stored] : status) {
    auto& kept = out[d];
    for (const auto& [src, st] : stored)
      if (st.time >= now - decay) kept.emplace_hint(kept.end(), src, st);
  }
  return out;
}

VTEnv aligned_env(const std::map<DeviceId, StoredTree>& stored) {
  VTEnv env;
  for (const auto& [d, st] : stored) env.emplace_hint(env.end(), d, st.tree);
  return env;
}

NetConfig env_change(const NetConfig& cfg, NetEnv env) {
  for (const auto& [d, nbrs] : env.topology) {
    if (!nbrs.count(d))
      throw std::invalid_argument("topology must make device " + std::to_string(d) +
                                  " its own neighbour");
    for (DeviceId n : nbrs)
      if (!env.topology.count(n))
        throw std::invalid_argument("neighbour " + std::to_string(n) + " is not in the network");
  }
  NetConfig out;
  out.clock = cfg.clock;
  for (const auto& [d, nbrs] : env.topology) {
    auto it = cfg.status.find(d);
    out.status[d] = it == cfg.status.end() ? std::map<DeviceId, StoredTree>{} : it->second;
  }
  out.env = std::move(env);
  return out;
}

FireResult fire(const NetConfig& cfg, DeviceId device, const Program& program, Timestamp now,
                Timestamp decay, const EvalOptions& opts) {
  auto topo = cfg.env.topology.find(device);
  if (topo == cfg.env.topology.end())
    throw std::invalid_argument("device " + std::to_string(device) + " is not in the network");
  FireResult r;
  r.config.env = cfg.env;
  r.config.clock = now;
  r.config.status = filter_old(cfg.status, now, decay);
  VTEnv env = aligned_env(r.config.status[device]);
  for (const auto& [d, t] : env) r.env_domain.push_back(d);
  static const SensorState kNoSensors;
  auto sens = cfg.env.sensors.find(device);
  const SensorState& sensors = sens == cfg.env.sensors.end() ? kNoSensors : sens->second;
  r.tree = eval(program, device, sensors, env, program.main, opts);
  for (DeviceId n : topo->second) r.config.status[n][device] = StoredTree{r.tree, now};
  return r;
}

NbrField nbr_range_reading(const Scenario& s, DeviceId device, Timestamp now,
                           const std::map<DeviceId, Timestamp>& senders) {
  NbrField f;
  auto here = s.position(device, now);
  if (!here) throw std::invalid_argument("device " + std::to_string(device) + " is off");
  for (const auto& [d, t] : senders) {
    if (d == device) continue;
    auto there = s.position(d, t);
    if (!there) throw std::invalid_argument("sender " + std::to_string(d) + " was off");
    f.entries.emplace(d, make_num(distance(*here, *there)));
  }
  f.entries[device] = make_num(0);
  return f;
}

namespace {

enum Phase { kActivate = 0, kFire = 1, kDeactivate = 2 };

struct Step {
  Timestamp t;
  Phase phase;
  DeviceId device;
};

NetEnv env_at(const Scenario& s, Timestamp t, bool closing) {
  NetEnv env;
  env.topology = topology_at(s, t, closing);
  for (const auto& [d, n] : env.topology) env.sensors[d] = s.local_sensors(d, t);
  return env;
}

}  // namespace

FireTrace run_scenario(const Scenario& s, const Program& program, const RunOptions& opts) {
  std::vector<Step> steps;
  for (const auto& [d, segs] : s.paths) {
    for (const auto& seg : segs) {
      steps.push_back({seg.from, kActivate, d});
      steps.push_back({seg.to, kDeactivate, d});
    }
  }
  for (const auto& f : s.fires) steps.push_back({f.t, kFire, f.device});
  std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) {
    return std::tie(a.t, a.phase) < std::tie(b.t, b.phase);
  });

  std::mt19937_64 rng(opts.seed.value_or(0));
  EvalOptions eo;
  eo.fuel = opts.fuel;
  eo.rng = opts.seed ? &rng : nullptr;

  FireTrace trace;
  NetConfig cfg;
  for (const auto& st : steps) {
    if (st.phase != kFire) {
      cfg = env_change(cfg, env_at(s, st.t, st.phase == kDeactivate));
      continue;
    }
    NetEnv env = env_at(s, st.t, false);
    std::map<DeviceId, Timestamp> senders;
    auto fresh = filter_old(cfg.status, st.t, s.decay);
    for (const auto& [src, stored] : fresh[st.device]) senders[src] = stored.time;
    env.sensors[st.device].neighbour["nbr-range"] =
        nbr_range_reading(s, st.device, st.t, senders);
    cfg = env_change(cfg, std::move(env));
    FireResult r = fire(cfg, st.device, program, st.t, s.decay, eo);
    cfg = std::move(r.config);
    trace.fires.push_back({st.t, st.device, r.tree, std::move(r.env_domain)});
  }
  return trace;
}

}  // namespace fieldcalc
