// normalize.hpp - rewriting a projected behavioral type into a finite basis
// of sequential components: restrictions float to the top, the scoping
// operators (exclude / project / rename) are compiled away, and the
// reachable parallel components are closed into an atom list that the net
// builder can take places from.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "rua/behavior.hpp"

namespace rua {

// All restrictions hoisted to one outermost telescope.  Hoisting out of a
// replication or recursion merges per-copy private names into one shared
// name, which can only add synchronisations; `approx` records that this
// happened so verdicts can be qualified.
struct NuLifted {
  BPtr body;                  // restriction-free
  std::vector<Name> hidden;   // freshly named, outermost first
  bool approx = false;
};
NuLifted lift_nu(const BPtr& t);

// The elimination passes, in their required order.  Each removes one
// operator kind and may rely on the earlier ones being gone:
//   elim_exclude removes ^S, elim_project removes @S, elim_rename removes
//   renamings.  Recursive definitions crossed by a pending context are
// re-issued as fresh definitions, one per (variable, context) pair; since
// contexts are trimmed to each definition's free names, the passes
// terminate on recursive types.
BPtr elim_exclude(const BPtr& t);
BPtr elim_project(const BPtr& t);
BPtr elim_rename(const BPtr& t);
BPtr elim_scoping(const BPtr& t);   // the three passes, in order

// Top-level parallel components, Zero dropped.
std::vector<BPtr> par_leaves(const BPtr& t);

// Finite basis: the least set of atoms (non-Zero parallel leaves of folded
// reachable terms) closed under single-component transitions.  Folding
// replaces any subterm equal to the one-step unfolding of a known recursive
// definition by the definition itself, which keeps the reachable leaves
// finite for the types the inference engine produces.
struct AtomSucc {
  TLabel label;
  std::vector<int> produce;   // atom indices of the folded target's leaves
};

struct Basis {
  std::vector<BPtr> atoms;                    // discovery order
  std::map<std::string, int> index;           // print(atom) -> position
  std::vector<std::vector<AtomSucc>> succs;   // parallel with atoms
  std::vector<int> initial;                   // atom indices, with repeats
  std::vector<Name> hidden;                   // restricted channel names
  bool atom_bound = false;    // closure aborted; contents are partial
};

Basis basis_closure(const BPtr& t, const std::vector<Name>& hidden = {},
                    int bound = 2000);

}  // namespace rua
