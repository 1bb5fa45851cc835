// petri.hpp - place/transition nets over basis atoms.  Places are atoms,
// markings count tokens per place, transitions come from single-atom steps
// and synchronisations on hidden channels.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "rua/normalize.hpp"

namespace rua {

using Marking = std::vector<int>;

struct Transition {
  TLabel label;       // Tau or an access; never In/Out/Pair
  Marking consume;    // dense, length = |places|
  Marking produce;
};

struct Net {
  std::vector<BPtr> places;   // basis atoms
  std::vector<Transition> transitions;
  Marking initial;
  std::vector<int> initial_order;   // place ids, first-encounter order
  Name res;                         // the resource the net was built for
  std::vector<Name> hidden;
  bool atom_bound = false;          // basis closure was aborted
};

// Transition rules: one tau/access transition per atom step (consuming one
// token), plus one tau transition per complementary pair of atom steps on a
// hidden channel (consuming one token from each side; a place may pair with
// itself, consuming two of its tokens).  Lone actions on channels outside
// `hidden` yield no transition.
Net build_net(const Basis& basis, const Name& x);

// All enabled firings at m, in transition order.
std::vector<std::pair<TLabel, Marking>> net_step(const Net& net,
                                                 const Marking& m);

// Access traces of the net on net.res, mirroring traces_bounded on types:
// tau transitions (and accesses to other resources) are internal moves,
// accesses to net.res extend the word, and in extended mode a word gains a
// final down-marker when some marking in its closure is pdisabled.
TraceSet ptraces_bounded(const Net& net, int k, bool extended,
                         int cap = 10000);

// disabled() lifted to markings: every occupied place is disabled for
// s minus the hidden names (a marking stands for the restricted parallel
// composition of its tokens' atoms).
bool pdisabled(const Net& net, const Marking& m, const std::set<Name>& s);

std::string net_dump_text(const Net& net);
std::string net_dump_dot(const Net& net);

}  // namespace rua
