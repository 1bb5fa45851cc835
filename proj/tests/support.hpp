// support.hpp - shared helpers for the test suites: fixture programs,
// random generators for processes and behavioral types.
#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rua/behavior.hpp"
#include "rua/syntax.hpp"

namespace ruatest {

using namespace rua;

// ---------------------------------------------------------------------------
// Fixture programs.  These are also written to disk for CLI tests.
// ---------------------------------------------------------------------------

// Initialise, two parallel readers, close after both finished.
inline const char* kCobegin = R"(
spec 1 = pref(I R* C);

newR 1, x in
new c1, c2 in
  acc(x, init). (c1!() | c1!())
| c1?(). acc(x, read). c2!()
| c1?(). acc(x, read). c2!()
| c2?(). c2?(). acc(x, close)
)";

// Same, but one of the two completion signals is never awaited, so close
// can race ahead of the second read.
inline const char* kCobeginMutant = R"(
spec 1 = pref(I R* C);

newR 1, x in
new c1, c2 in
  acc(x, init). (c1!() | c1!())
| c1?(). acc(x, read). c2!()
| c1?(). acc(x, read). c2!()
| c2?(). acc(x, close)
)";

// A recursive server reading a file n times (booleans stand in for the
// counter), then closing via the reply channel.
inline const char* kRepeatRead = R"(
spec 1 = pref(I R* C);

new s in
  *(s?(n, x, r). if n then r!() else (new r2 in s!(n, x, r2) | r2?(). acc(x, read). r!()))
| newR 1, x in new r in acc(x, init). s!(false, x, r) | r?(). acc(x, close)
)";

// Liveness-annotated variant: every communication is marked as succeeding
// and the spec requires that stopping is only permitted after close.
inline const char* kRepeatReadLive = R"(
spec 1 = pref(I R* C v);

new s in
  *(s??(n, x, r). if n then r!!() else (new r2 in s!!(n, x, r2) | r2??(). acc(x, read). r!!()))
| newR 1, x in new r in acc(x, init). s!!(false, x, r) | r??(). acc(x, close)
)";

// Mutant: the close after the reply never happens.
inline const char* kRepeatReadLiveMutant = R"(
spec 1 = pref(I R* C v);

new s in
  *(s??(n, x, r). if n then r!!() else (new r2 in s!!(n, x, r2) | r2??(). acc(x, read). r!!()))
| newR 1, x in new r in acc(x, init). s!!(false, x, r) | r??(). 0
)";

// Producer/consumer alternating puts and gets through two lock channels.
inline const char* kProdCons = R"(
label P, G;
spec ready = pref((P G)*);

newR ready, x in
new pl, gl in
  pl!()
| *(pl?(). acc(x, P). gl!())
| *(gl?(). acc(x, G). pl!())
)";

// Mutant: the first token goes to the get side, so a get precedes any put.
inline const char* kProdConsMutant = R"(
label P, G;
spec ready = pref((P G)*);

newR ready, x in
new pl, gl in
  gl!()
| *(pl?(). acc(x, P). gl!())
| *(gl?(). acc(x, G). pl!())
)";

// A server creating fresh resources per request, clients reading twice
// concurrently, a bookkeeping channel sequencing the close.
inline const char* kSampleRun = R"(
spec 1 = pref(I (R+W)* C v);

new create, s in
  *(create??(r). newR 1, x in acc(x, init). r!!(x))
| *(new r in create!!(r) | r??(y). new c in s!!(false, y, c) | s!!(false, y, c) | c??(). c??(). acc(y, close))
| *(s??(b, x, r). if b then r!!() else acc(x, read). s!!(b, x, r))
)";

// ---------------------------------------------------------------------------
// Random generators (deterministic via the caller's engine).
// ---------------------------------------------------------------------------

inline int rand_int(std::mt19937& gen, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(gen);
}

template <typename T>
inline const T& pick(std::mt19937& gen, const std::vector<T>& v) {
  return v[rand_int(gen, 0, (int)v.size() - 1)];
}

// Random closed behavioral type over a small name pool; guarded recursion
// only, size bounded by `fuel`.
inline BPtr random_btype(std::mt19937& gen, int fuel,
                         std::vector<Name> chans = {"a", "b"},
                         std::vector<Name> ress = {"x"},
                         std::vector<Name> rec_vars = {}) {
  if (fuel <= 0) return b_zero();
  int c = rand_int(gen, 0, 11);
  auto sub = [&](int f) {
    return random_btype(gen, f, chans, ress, rec_vars);
  };
  switch (c) {
    case 0:
      return b_zero();
    case 1:
      return !rec_vars.empty() && rand_int(gen, 0, 1)
                 ? b_var(pick(gen, rec_vars))
                 : b_zero();
    case 2:
      return b_act(act_out(pick(gen, chans)),
                   rand_int(gen, 0, 1) ? Attr::Succeeds : Attr::None,
                   sub(fuel - 1));
    case 3:
      return b_act(act_in(pick(gen, chans)),
                   rand_int(gen, 0, 1) ? Attr::Succeeds : Attr::None,
                   sub(fuel - 1));
    case 4: {
      static const std::vector<std::string> labels{"I", "R", "W", "C"};
      return b_act(act_acc(pick(gen, ress), pick(gen, labels)), Attr::None,
                   sub(fuel - 1));
    }
    case 5:
      return b_act(act_tau(), rand_int(gen, 0, 1) ? Attr::Succeeds : Attr::None,
                   sub(fuel - 1));
    case 6:
      return b_par(sub(fuel / 2), sub(fuel / 2));
    case 7:
      return b_choice(sub(fuel / 2), sub(fuel / 2));
    case 8:
      return b_hide(pick(gen, chans), sub(fuel - 1));
    case 9: {
      std::set<Name> s{pick(gen, chans)};
      if (rand_int(gen, 0, 1)) s.insert(pick(gen, ress));
      return rand_int(gen, 0, 1) ? b_exclude(sub(fuel - 1), s)
                                 : b_project(sub(fuel - 1), s);
    }
    case 10: {
      std::vector<std::pair<Name, Name>> pr{
          {pick(gen, chans), pick(gen, chans)}};
      return b_rename(pr, sub(fuel - 1));
    }
    case 11: {
      // Guarded recursion: mu v. act. body
      Name v = "v" + std::to_string(rand_int(gen, 0, 99));
      auto inner_vars = rec_vars;
      inner_vars.push_back(v);
      BPtr body = random_btype(gen, fuel - 1, chans, ress, inner_vars);
      TAction g = rand_int(gen, 0, 1) ? act_out(pick(gen, chans))
                                      : act_acc(pick(gen, ress), "R");
      return b_rec(v, b_act(g, Attr::None, body));
    }
  }
  return b_zero();
}

// Replication-free random type whose LTS is certainly finite (for
// simulation-based laws).
inline BPtr random_finite_btype(std::mt19937& gen, int fuel) {
  BPtr t = random_btype(gen, fuel);
  return t;
}

// A one-layer type (every action continues with 0).  The replication law
// needs these: *A stays finite-state only when A cannot park residuals.
inline BPtr random_shallow_btype(std::mt19937& gen) {
  auto leaf = [&]() {
    int c = rand_int(gen, 0, 3);
    TAction g = c == 0   ? act_out(rand_int(gen, 0, 1) ? "a" : "b")
                : c == 1 ? act_in(rand_int(gen, 0, 1) ? "a" : "b")
                : c == 2 ? act_acc("x", rand_int(gen, 0, 1) ? "R" : "W")
                         : act_tau();
    return b_act(g, rand_int(gen, 0, 3) == 0 ? Attr::Succeeds : Attr::None,
                 b_zero());
  };
  BPtr t = leaf();
  int extra = rand_int(gen, 0, 2);
  for (int i = 0; i < extra; ++i) t = b_choice(t, leaf());
  return t;
}

inline BPtr hide_all(const std::vector<Name>& names, BPtr t) {
  for (auto it = names.rbegin(); it != names.rend(); ++it) t = b_hide(*it, t);
  return t;
}

// True when every recursion variable is reachable from its binder through
// action prefixes and internal choice only.  Crossing any other operator
// makes each unfolding accumulate structure (parallel leftovers or stacked
// wrappers), so the transition system grows without bound; simulation-based
// suites regenerate such instances instead of exploring them.
// True iff every mu-binder's variable occurs at most once in its body.
// Unfolding such a recursion never duplicates structure, so repeated
// unfolding (in closures and simulation) keeps states small.
inline bool linear_recs_only(const BPtr& t) {
  std::function<int(const BPtr&, const Name&)> count =
      [&](const BPtr& u, const Name& v) -> int {
    if (!u) return 0;
    if (u->kind == BType::Kind::Var) return u->name == v ? 1 : 0;
    if (u->kind == BType::Kind::Rec && u->name == v) return 0;  // shadowed
    int n = count(u->a, v) + count(u->b, v);
    return n > 2 ? 2 : n;    // saturating: only 0, 1, many matter
  };
  std::function<bool(const BPtr&)> go = [&](const BPtr& u) -> bool {
    if (!u) return true;
    if (u->kind == BType::Kind::Rec && count(u->a, u->name) > 1) return false;
    return go(u->a) && (!u->b || go(u->b));
  };
  return go(t);
}

inline bool tail_recursive_only(const BPtr& t) {
  std::function<bool(const BPtr&, std::set<Name>, std::set<Name>)> go =
      [&](const BPtr& u, std::set<Name> clean, std::set<Name> dirty) -> bool {
    if (!u) return true;
    switch (u->kind) {
      case BType::Kind::Zero:
        return true;
      case BType::Kind::Var:
        return !dirty.count(u->name);
      case BType::Kind::Act:
      case BType::Kind::Choice:
        return go(u->a, clean, dirty) && (!u->b || go(u->b, clean, dirty));
      case BType::Kind::Rec: {
        auto c2 = clean;
        auto d2 = dirty;
        c2.insert(u->name);
        d2.erase(u->name);
        return go(u->a, std::move(c2), std::move(d2));
      }
      default: {
        // Par, Repl, Hide, Rename, Exclude, Project: every live rec var
        // crossed here would grow on unfolding.
        auto d2 = dirty;
        d2.insert(clean.begin(), clean.end());
        return go(u->a, {}, d2) && (!u->b || go(u->b, {}, std::move(d2)));
      }
    }
  };
  return go(t, {}, {});
}

// Random trace-spec regex over the built-in labels, optionally ending with
// the completion marker (placed last so specs stay plausible).
inline SpecPtr random_spec(std::mt19937& gen, int fuel, bool allow_down = true) {
  static const std::vector<std::string> syms{"I", "R", "W", "C"};
  if (fuel <= 0) {
    int c = rand_int(gen, 0, 3);
    if (c == 0) return spec_epsilon();
    if (c == 1 && allow_down) return spec_down();
    return spec_symbol(pick(gen, syms));
  }
  switch (rand_int(gen, 0, 5)) {
    case 0:
      return spec_symbol(pick(gen, syms));
    case 1:
      return spec_epsilon();
    case 2:
      return spec_concat(random_spec(gen, fuel / 2, false),
                         random_spec(gen, fuel / 2, allow_down));
    case 3:
      return spec_union(random_spec(gen, fuel / 2, allow_down),
                        random_spec(gen, fuel / 2, allow_down));
    case 4:
      return spec_star(random_spec(gen, fuel / 2, false));
    default:
      return rand_int(gen, 0, 9) == 0 ? spec_empty()
                                      : spec_symbol(pick(gen, syms));
  }
}

// ---------------------------------------------------------------------------
// Random well-typed programs, emitted as source text so the parser runs on
// every sample.  Channel signatures are fixed (d0,d1,g*: no payload; e0: one
// boolean; f0: one resource), so arities and kinds always agree and type
// inference cannot fail on them.
// ---------------------------------------------------------------------------

struct RandomProgramOpts {
  bool bound_res = true;   // resources come from newR binders (obligations);
                           // otherwise the single free resource "x" is used
  int fuel = 6;
  int repl_weight = 1;     // 0 disables replication
};

namespace detail {

struct ProgramEmitter {
  std::mt19937& gen;
  RandomProgramOpts opts;
  std::vector<Name> bools;
  std::vector<Name> ress;
  std::vector<Name> chans0{"d0", "d1"};   // no payload
  int next_res = 0, next_bool = 0, next_chan = 0;

  std::string acc_word() {
    static const std::vector<std::string> words{"init", "read", "write",
                                                "close"};
    return pick(gen, words);
  }
  std::string bang() { return rand_int(gen, 0, 1) ? "!!" : "!"; }
  std::string query() { return rand_int(gen, 0, 1) ? "??" : "?"; }
  std::string bool_val() {
    if (!bools.empty() && rand_int(gen, 0, 1)) return pick(gen, bools);
    return rand_int(gen, 0, 1) ? "true" : "false";
  }
  std::string cont(int fuel) {
    if (fuel <= 0 || rand_int(gen, 0, 2) == 0) return "";
    return ". (" + emit(fuel) + ")";
  }

  std::string emit_input(int fuel) {
    int c = rand_int(gen, 0, 2);
    if (c == 0) return pick(gen, chans0) + query() + "()" + cont(fuel - 1);
    if (c == 1) {
      Name b = "bp" + std::to_string(next_bool++);
      bools.push_back(b);
      std::string body = cont(fuel - 1);
      bools.pop_back();
      return "e0" + query() + "(" + b + ")" + body;
    }
    Name r = "rp" + std::to_string(next_res++);
    ress.push_back(r);
    std::string body = cont(fuel - 1);
    ress.pop_back();
    return "f0" + query() + "(" + r + ")" + body;
  }

  std::string emit(int fuel) {
    if (fuel <= 0) return "0";
    for (int tries = 0; tries < 8; ++tries) {
      int c = rand_int(gen, 0, 11);
      switch (c) {
        case 0:
          return "0";
        case 1:
        case 2: {
          if (ress.empty()) break;
          return "acc(" + pick(gen, ress) + ", " + acc_word() + ")" +
                 cont(fuel - 1);
        }
        case 3: {   // output
          int k = ress.empty() ? rand_int(gen, 0, 1) : rand_int(gen, 0, 2);
          if (k == 0)
            return pick(gen, chans0) + bang() + "()" + cont(fuel - 1);
          if (k == 1)
            return "e0" + bang() + "(" + bool_val() + ")" + cont(fuel - 1);
          return "f0" + bang() + "(" + pick(gen, ress) + ")" + cont(fuel - 1);
        }
        case 4:
        case 5:
          return emit_input(fuel);
        case 6:
          return "(" + emit(fuel / 2) + " | " + emit(fuel / 2) + ")";
        case 7: {
          std::string cond = bool_val();
          return "if " + cond + " then (" + emit(fuel / 2) + ") else (" +
                 emit(fuel / 2) + ")";
        }
        case 8: {
          if (opts.repl_weight <= 0) break;
          return "*(" + emit_input(fuel - 2) + ")";
        }
        case 9: {
          if (!opts.bound_res) break;
          Name x = "xr" + std::to_string(next_res++);
          ress.push_back(x);
          std::string body = emit(fuel - 1);
          ress.pop_back();
          return "newR sp" + std::to_string(rand_int(gen, 0, 3)) + ", " + x +
                 " in (" + body + ")";
        }
        case 10: {
          Name g = "g" + std::to_string(next_chan++);
          chans0.push_back(g);
          std::string body = emit(fuel - 1);
          chans0.pop_back();
          return "new " + g + " in (" + body + ")";
        }
        case 11: {
          if (ress.empty()) break;
          // shorthand access prefix form
          static const std::vector<std::string> words{"init", "read", "write",
                                                      "close"};
          return pick(gen, words) + "(" + pick(gen, ress) + ")" +
                 cont(fuel - 1);
        }
      }
    }
    return "0";
  }
};

}  // namespace detail

inline std::string random_program(std::mt19937& gen,
                                  const RandomProgramOpts& opts = {}) {
  detail::ProgramEmitter em{gen, opts};
  std::string body;
  if (!opts.bound_res) {
    em.ress.push_back("x");
    body = "acc(x, " + em.acc_word() + ")" + em.cont(opts.fuel);
  } else {
    body = em.emit(opts.fuel);
  }
  int extra = rand_int(gen, 1, 2);
  for (int i = 0; i < extra; ++i) body += "\n| " + em.emit(opts.fuel);
  std::string out;
  out += "spec sp0 = pref(I R* C);\n";
  out += "spec sp1 = pref((R+W)*);\n";
  out += "spec sp2 = pref(I (R+W)* C v);\n";
  out += "spec sp3 = pref(R* C);\n";
  out += "new d0, d1, e0, f0 in (\n  " + body + "\n)\n";
  return out;
}

}  // namespace ruatest
