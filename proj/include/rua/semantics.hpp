// semantics.hpp - operational semantics of processes: canonical states,
// one-step reduction, and a bounded exhaustive explorer used as an oracle
// for the static analysis.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rua/syntax.hpp"

namespace rua {

// A canonical state: a telescope of channel/resource binders over a flat
// bag of parallel components.  Rearrangement (flattening parallel
// composition, hoisting binders, dropping inert components) happens only at
// this top level; bodies of replications and continuations of prefixes are
// kept intact apart from renaming bound names apart.
struct Binder {
  enum class Kind { Chan, Res };
  Kind kind = Kind::Chan;
  Name name;
  SpecPtr spec;            // Res: remaining permitted language L (pref(L))
  std::string spec_name;   // Res: declared origin, for reports
};

struct State {
  std::vector<Binder> binders;
  std::vector<ProcPtr> comps;
};

State make_state(const ProcPtr& p);
State canonicalize(const State& s);
std::string print_state(const State& s);

// Label on a reduction: internal, or a visible access to a free resource.
struct StepLabel {
  bool is_access = false;
  Name res;
  std::string acc;
};
std::string print_step_label(const StepLabel& l);

// All one-step reductions from a canonical state, deduplicated, in
// deterministic order.  Includes communications, accesses (on bound
// resources: silently updating the binder's remaining language; on free
// resources: visible), conditionals, and steps of one or two unfolded
// copies of each replication.
std::vector<std::pair<StepLabel, State>> step(const State& s);

// A state violates resource safety if some resource binder in it (at the
// top level or anywhere in its components) permits no trace at all.
bool state_resource_safe(const State& s);

// Specs of all resource binders that the state exposes up to rearrangement:
// the binder telescope itself plus binders at the top of replication bodies
// (one unfolding exposes them).
std::vector<std::pair<Name, SpecPtr>> exposed_resource_specs(const State& s);

struct ExploreResult {
  int states = 0;
  bool truncated = false;          // budget or depth cut exploration short
  bool safety_violation = false;   // some reachable state not resource-safe
  bool liveness_violation = false; // some stuck state may not stop yet
  std::vector<std::string> witness;    // labels to the first bad state
  std::string bad_state;               // printed bad state
};

// Bounded BFS over reachable canonical states.
ExploreResult explore(const ProcPtr& p, int depth, int budget = 50000,
                      bool check_liveness = false);

// Access traces on one free resource, bounded; used to cross-check inferred
// types against actual process behavior.
std::set<std::vector<std::string>> process_traces(const ProcPtr& p,
                                                  const Name& x, int depth,
                                                  int budget = 50000);

}  // namespace rua
