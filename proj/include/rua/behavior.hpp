// behavior.hpp - behavioral types: a CCS-like process algebra whose visible
// actions are channel inputs/outputs and resource accesses.  Types are what
// the inference engine assigns to processes; the analyses run on them.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rua/syntax.hpp"

namespace rua {

struct TAction {
  enum class Kind { Out, In, Acc, Tau };
  Kind kind = Kind::Tau;
  Name name;          // Out/In channel, Acc resource
  std::string acc;    // Acc label
};

TAction act_out(const Name& n);
TAction act_in(const Name& n);
TAction act_acc(const Name& n, const std::string& label);
TAction act_tau();
bool operator==(const TAction& a, const TAction& b);

struct BType;
using BPtr = std::shared_ptr<const BType>;

struct BType {
  enum class Kind {
    Zero,      // no behavior
    Act,       // act[attr]. a
    Par,       // a | b
    Choice,    // a (+) b        internal choice
    Repl,      // *a
    Hide,      // (new name) a   restriction
    Rename,    // [src->dst,...] a
    Exclude,   // a ^ names      actions on names replaced by tau
    Project,   // a @ names      actions outside names replaced by tau
    Rec,       // mu name. a
    Var        // recursion variable
  };
  Kind kind = Kind::Zero;
  TAction act;               // Act
  Attr attr = Attr::None;    // Act: does the action eventually succeed?
  BPtr a, b;
  Name name;                 // Hide bound name, Rec variable, Var name
  std::vector<std::pair<Name, Name>> pairs;    // Rename
  std::set<Name> names;                        // Exclude/Project

  // Free names / free recursion variables, computed at most once per node
  // (nodes are shared across types, so traversals must not revisit).  Filled
  // lazily by btype_free_names / btype_free_vars; nodes are otherwise
  // immutable.
  mutable std::shared_ptr<const std::set<Name>> free_cache;
  mutable std::shared_ptr<const std::set<Name>> fvar_cache;
};

// Constructors; they apply a few behavior-preserving simplifications (unit
// Zero under Par/Repl/Hide/Rename/Exclude, empty renamings/exclusions,
// mu a. a collapsing to Zero).
BPtr b_zero();
BPtr b_act(const TAction& act, Attr attr, BPtr cont);
BPtr b_par(BPtr a, BPtr b);
BPtr b_choice(BPtr a, BPtr b);
BPtr b_repl(BPtr a);
BPtr b_hide(const Name& n, BPtr a);
BPtr b_rename(std::vector<std::pair<Name, Name>> pairs, BPtr a);
BPtr b_exclude(BPtr a, std::set<Name> names);
BPtr b_project(BPtr a, std::set<Name> names);
BPtr b_rec(const Name& var, BPtr a);
BPtr b_var(const Name& var);

std::string print_btype(const BPtr& t);
std::set<Name> btype_free_names(const BPtr& t);
std::set<Name> btype_free_vars(const BPtr& t);   // free recursion variables
bool btype_eq(const BPtr& a, const BPtr& b);    // syntactic, via printing

// Globally fresh name derived from `base` (shared counter across modules,
// so distinct passes never collide).  reset_fresh_names pins the counter for
// reproducible output; the CLI calls it once at startup.
Name fresh_name(const Name& base);
void reset_fresh_names(long next);

// Substitution of a type for a recursion variable (used to unfold mu).
BPtr b_subst_var(const BPtr& t, const Name& var, const BPtr& replacement);
// Capture-free renaming of free channel/resource names.
BPtr b_apply_rename(const BPtr& t,
                    const std::vector<std::pair<Name, Name>>& pairs);

// ---------------------------------------------------------------------------
// Labelled transitions.
//
// Besides the four action labels, a transition may carry a complementary
// pair {in z, out w}: two parallel components each offering one half of a
// potential synchronisation.  A pair over a single name yields an
// additional tau transition (the synchronisation itself); pairs over two
// distinct names remain inert unless a renaming above identifies the names.
// ---------------------------------------------------------------------------

struct TLabel {
  enum class Kind { Out, In, Acc, Tau, Pair };
  Kind kind = Kind::Tau;
  Name name;          // Out/In/Acc subject; Pair: input side
  std::string acc;    // Acc label
  Name other;         // Pair: output side
};

TLabel tl_out(const Name& n);
TLabel tl_in(const Name& n);
TLabel tl_acc(const Name& n, const std::string& label);
TLabel tl_tau();
TLabel tl_pair(const Name& in_side, const Name& out_side);
std::string print_tlabel(const TLabel& l);
std::set<Name> tlabel_targets(const TLabel& l);
inline bool tlabel_is_tau(const TLabel& l) { return l.kind == TLabel::Kind::Tau; }

// One-step transitions of a behavioral type; deduplicated, deterministic
// order.  Unguarded recursion contributes no transitions (divergence).
std::vector<std::pair<TLabel, BPtr>> tstep(const BPtr& t);

// disabled(t, S): t can do nothing observable now or ever that the
// environment is waiting for, where accesses to resources in S are the
// observations that matter and a communication annotated as succeeding is
// assumed to be consumed eventually.
bool disabled(const BPtr& t, const std::set<Name>& S);

// ---------------------------------------------------------------------------
// Access traces.
// ---------------------------------------------------------------------------

struct TraceSet {
  std::set<std::vector<std::string>> words;    // over access labels (+ kDown)
  bool partial = false;    // a cap was hit; `words` is a lower approximation
};

// Access traces of `t` on resource x, up to length k.  If `extended`, a
// trace may additionally end in kDown when some state reached by it is
// disabled with respect to {x}.  `cap` bounds each tau-closure layer.
TraceSet traces_bounded(const BPtr& t, const Name& x, int k, bool extended,
                        int cap = 10000);

// ---------------------------------------------------------------------------
// Weak simulation.
// ---------------------------------------------------------------------------

struct SimResult {
  bool holds = false;
  bool not_finite_state = false;    // state bound hit before an answer
};

// Does t2 weakly simulate t1?  With `extended`, related states must also
// satisfy: whenever t1's state is disabled w.r.t. S, so is t2's, for every
// S ranging over subsets of the free names involved.
SimResult simulates(const BPtr& t1, const BPtr& t2, bool extended,
                    int state_bound = 2000);

}  // namespace rua
