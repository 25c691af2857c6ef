#ifndef FIELDCALC_DEVICE_HPP
#define FIELDCALC_DEVICE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/builtins.hpp"
#include "fieldcalc/errors.hpp"

namespace fieldcalc {

struct ValueTree;
using TreePtr = std::shared_ptr<const ValueTree>;

// Ordered tree of values produced by one evaluation; children follow the
// evaluation rule that built the node.
struct ValueTree {
  Value root;
  std::vector<TreePtr> children;
};

TreePtr make_tree(Value root, std::vector<TreePtr> children = {});
bool tree_equal(const TreePtr& a, const TreePtr& b);

// Neighbours' most recent trees, keyed by device.
using VTEnv = std::map<DeviceId, TreePtr>;

// Root of every tree in the environment, as a field.
NbrField roots(const VTEnv& env);
// i-th child (1-based) of every tree; devices lacking it are dropped.
VTEnv project(const VTEnv& env, std::size_t i);
// Last child of the trees whose second-to-last child has root `fn`.
VTEnv project_fn(const VTEnv& env, const ExprPtr& fn);

constexpr std::int64_t kDefaultFuel = 1'000'000;

struct EvalOptions {
  std::int64_t fuel = kDefaultFuel;
  std::mt19937_64* rng = nullptr;
};

// Big-step evaluation of a closed expression on device `self` against the
// aligned environment `env`. Throws EvalError subclasses.
TreePtr eval(const Program& program, DeviceId self, const SensorState& sensors,
             const VTEnv& env, const ExprPtr& e, const EvalOptions& opts = {});

}  // namespace fieldcalc

#endif
