// checker.hpp - specification DFAs, unsafe-marking patterns, and the
// counter-abstracted reachability check that decides each trace-inclusion
// obligation.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rua/inference.hpp"
#include "rua/petri.hpp"

namespace rua {

// Deterministic automaton for the prefix closure of a spec language: every
// state accepts, dead states are removed, and the transition map is partial
// (a missing edge means the word leaves the language).
struct Dfa {
  int states = 1;
  int start = 0;
  std::map<std::pair<int, std::string>, int> delta;
  std::set<std::string> symbols;
};

// Safety mode erases the down-marker from the spec; extended (liveness)
// mode keeps it in the alphabet.
Dfa spec_to_dfa(const SpecPtr& phi, bool extended);
bool dfa_accepts(const Dfa& d, const std::vector<std::string>& word);

// A condition on product states (marking, q) that witnesses a violation:
//   Cover    - the marking dominates `cover` (some access is enabled) and
//              the DFA has no move for that access at q;
//   Disabled - every occupied place is disabled for the resource and the
//              DFA has no down-move at q (liveness only).
struct UnsafePattern {
  enum class Kind { Cover, Disabled };
  Kind kind = Kind::Cover;
  Marking cover;
  int q = 0;
  std::string symbol;   // the access (or down-marker) with no DFA move
};

std::vector<UnsafePattern> unsafe_conditions(const Net& net, const Dfa& dfa,
                                             bool extended);

// Reachability over abstract markings: token counts live in {0, 1, ...,
// cap-1, cap}, where the top value means "cap or more" and is sticky
// (widening on both add and subtract).
struct ReachResult {
  bool unsafe = false;
  std::vector<std::string> witness;   // printable path; empty when safe
  long abstract_states = 0;
  bool counter_abstracted = false;    // some counter saturated
  bool state_bound = false;           // search aborted; no verdict
  std::set<std::string> visited;      // abstract_key's, if collect was set
};

// Key of the abstraction of an exact marking at DFA state q (tests compare
// exact explorations against the abstract reachable set).
std::string abstract_key(const Marking& m, int q, int cap);

ReachResult abstract_reach(const Net& net, const Dfa& dfa,
                           const std::vector<UnsafePattern>& patterns,
                           int cap = 3, long state_bound = 1000000,
                           bool collect = false);

// One obligation end to end: project to the resource, lift restrictions,
// eliminate the scoping operators, close the basis, build the net and DFA,
// and run the abstract reachability.  Never answers "unsafe", only
// PossiblyUnsafe (safe == false) with a witness and approximation flags.
struct CheckOptions {
  bool extended = false;   // liveness mode
  int cap = 3;
  int atom_bound = 2000;
  long state_bound = 1000000;
};

struct CheckResult {
  Name resource;
  std::string spec_name;
  bool safe = false;
  std::vector<std::string> witness;
  std::vector<std::string> approximations;
  long places = 0;
  long transitions = 0;
  long abstract_states = 0;
  double millis = 0;
  Net net;            // kept for dumps and reports
  Dfa dfa;
  BPtr normalized;    // body after restriction lifting and elimination
};

CheckResult check_inclusion(const TraceObligation& ob,
                            const CheckOptions& opt = {});

}  // namespace rua
