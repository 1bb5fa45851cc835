// syntax.hpp - process terms, access-trace specifications, parser and printers
#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rua {

using Name = std::string;

// Marker used internally for the "resource is done" symbol; printed as `v`.
inline const std::string kDown = "v";

// ---------------------------------------------------------------------------
// Access-trace specifications.
//
// A resource binder carries a prefix-closed set of permitted access traces,
// written pref(L) for a regular language L over access labels, optionally
// ending in the completion marker `v`.  We store L; all queries (residuals,
// emptiness, completion) are phrased on L.
// ---------------------------------------------------------------------------

struct TraceSpec;
using SpecPtr = std::shared_ptr<const TraceSpec>;

struct TraceSpec {
  enum class Kind { Empty, Epsilon, Symbol, Down, Concat, Union, Star };
  Kind kind;
  std::string sym;    // Symbol only
  SpecPtr left, right;
};

SpecPtr spec_empty();
SpecPtr spec_epsilon();
SpecPtr spec_symbol(const std::string& sym);
SpecPtr spec_down();
SpecPtr spec_concat(SpecPtr a, SpecPtr b);
SpecPtr spec_union(SpecPtr a, SpecPtr b);
SpecPtr spec_star(SpecPtr a);

// Does L contain the empty word?
bool spec_nullable(const SpecPtr& s);
// Is L the empty language?  (Smart constructors keep this syntactic.)
bool spec_is_empty(const SpecPtr& s);
// Brzozowski derivative of L by an access label (or by kDown).
SpecPtr spec_deriv(const SpecPtr& s, const std::string& sym);
// All symbols occurring in the regex (labels; kDown included if present).
std::set<std::string> spec_symbols(const SpecPtr& s);
// Replace the completion marker by epsilon (used by safety-only analyses).
SpecPtr spec_erase_down(const SpecPtr& s);
// Does the completion marker occur at all?
bool spec_has_down(const SpecPtr& s);
std::string spec_print(const SpecPtr& s);

// A word w is permitted if w is a prefix of some word of L.  A trace ending
// in the completion marker is permitted iff the residual language after the
// preceding accesses contains a word starting with `v`.
inline bool spec_down_permitted(const SpecPtr& s) {
  return !spec_is_empty(spec_deriv(s, kDown));
}

// ---------------------------------------------------------------------------
// Process terms.
// ---------------------------------------------------------------------------

enum class Attr { None, Succeeds };    // annotation on communication prefixes

struct Value {
  enum class Kind { Var, True, False };
  Kind kind = Kind::Var;
  Name name;    // Var only
};

Value v_var(const Name& n);
Value v_bool(bool b);
bool operator==(const Value& a, const Value& b);

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct Process {
  enum class Kind {
    Nil,      //  0
    Output,   //  chan!(args). a        (attr: ! none, !! succeeds)
    Input,    //  chan?(params). a
    Par,      //  a | b
    If,       //  if cond then a else b
    Nu,       //  new chan in a
    Repl,     //  *a
    Acc,      //  acc(chan, acc). a
    NuR       //  newR spec_name, chan in a
  };
  Kind kind = Kind::Nil;
  Name chan;                   // Output/Input subject, Nu/NuR bound name, Acc subject
  std::vector<Value> args;     // Output
  std::vector<Name> params;    // Input
  Attr attr = Attr::None;      // Output/Input
  std::string acc;             // Acc label
  SpecPtr spec;                // NuR: language L, permitted traces = pref(L)
  std::string spec_name;       // NuR: name of the declared spec, for reporting
  Value cond;                  // If
  ProcPtr a, b;
};

ProcPtr p_nil();
ProcPtr p_out(const Name& chan, std::vector<Value> args, Attr t, ProcPtr cont);
ProcPtr p_in(const Name& chan, std::vector<Name> params, Attr t, ProcPtr cont);
ProcPtr p_par(ProcPtr a, ProcPtr b);
ProcPtr p_if(const Value& cond, ProcPtr a, ProcPtr b);
ProcPtr p_nu(const Name& chan, ProcPtr body);
ProcPtr p_repl(ProcPtr body);
ProcPtr p_acc(const Name& chan, const std::string& acc, ProcPtr cont);
ProcPtr p_nur(const Name& chan, SpecPtr spec, const std::string& spec_name, ProcPtr body);

std::string print_process(const ProcPtr& p);
std::set<Name> free_names(const ProcPtr& p);

// Capture-avoiding substitution of values for names (communication step).
// Substituted values are free names or booleans, and bound names are unique
// after parsing, so no renaming is ever required here.
ProcPtr subst_process(const ProcPtr& p, const std::map<Name, Value>& sub);

// Rewrite every communication prefix to the "succeeds" annotation.
ProcPtr assume_all_succeed(const ProcPtr& p);

// ---------------------------------------------------------------------------
// Programs and parsing.
// ---------------------------------------------------------------------------

struct Program {
  std::vector<std::string> labels;         // declared access labels (I R W C built in)
  std::map<std::string, SpecPtr> specs;    // named trace specs
  ProcPtr proc;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

// Parses a program.  Bound names are renamed apart deterministically, so all
// binders in the result bind distinct names.
Program parse_program(const std::string& source);

// Parses just a spec regex body, e.g. "I R* C v" (used by tests and tools).
SpecPtr parse_spec(const std::string& source);

}  // namespace rua
