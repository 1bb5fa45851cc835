// inference.hpp - assigns each process a behavioral type by syntax-directed
// constraint generation, unifies value types, and closes the behavioral
// subtype constraints into least solutions, leaving one trace-inclusion
// obligation per resource binder.
#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rua/behavior.hpp"
#include "rua/syntax.hpp"

namespace rua {

struct VType;
using VTypePtr = std::shared_ptr<const VType>;

// Types of values: booleans, resources, channels carrying typed names plus
// the behavior granted to the receiver, and unification variables.
struct VType {
  enum class Kind { Bool, Res, Chan, Var };
  Kind kind = Kind::Var;
  int id = 0;                                     // Var
  std::vector<std::pair<Name, VTypePtr>> params;  // Chan formals
  Name body_var;                                  // Chan body (a type variable)
};

VTypePtr vt_bool();
VTypePtr vt_res();
VTypePtr vt_var(int id);
VTypePtr vt_chan(std::vector<std::pair<Name, VTypePtr>> params,
                 const Name& body_var);
std::string print_vtype(const VTypePtr& t);

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A subtype constraint var >= body, pre-closure.
struct SubConstraint {
  Name var;
  BPtr body;
};

// A per-resource proof obligation: the access traces of `body` on `res`
// must all be permitted by pref(spec).
struct TraceObligation {
  Name res;
  BPtr body;
  SpecPtr spec;
  std::string spec_name;
};

struct InferResult {
  BPtr type;                           // top-level type, variables solved
  std::map<Name, VTypePtr> env;        // assumptions on free names
  std::vector<TraceObligation> obligations;    // bodies closed
  BPtr raw_type;                       // top-level type before closure
  std::vector<SubConstraint> raw_subs; // constraints before closure
};

// Runs inference on a program.  `seed` offsets fresh-variable numbering
// (output is deterministic for a fixed seed).  Throws TypeError on
// ill-typed input (arity clashes, a boolean used as a channel, ...).
InferResult infer(const Program& prog, int seed = 0);

}  // namespace rua
