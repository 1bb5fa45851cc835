// checker.cpp - DFA construction from spec regexes, unsafe patterns, and
// explicit-state reachability over counter-abstracted markings.
#include "rua/checker.hpp"

#include <chrono>
#include <deque>
#include <sstream>

#include "rua/normalize.hpp"

namespace rua {
namespace {

// Moore refinement with an implicit non-accepting sink; all real states
// accept (the language is prefix-closed), so the initial split is
// real-vs-sink and refinement proceeds on successor classes.
Dfa minimize(int nstates, int start,
             const std::map<std::pair<int, std::string>, int>& delta,
             const std::set<std::string>& symbols) {
  std::vector<int> cls(nstates, 0);
  int nclasses = 1;
  const int sink_class = -1;
  for (;;) {
    std::map<std::vector<int>, int> sig_to_new;
    std::vector<int> next(nstates);
    for (int s = 0; s < nstates; ++s) {
      std::vector<int> sig{cls[s]};
      for (auto& a : symbols) {
        auto it = delta.find({s, a});
        sig.push_back(it == delta.end() ? sink_class : cls[it->second]);
      }
      auto [pos, fresh] = sig_to_new.emplace(sig, (int)sig_to_new.size());
      next[s] = pos->second;
    }
    int n2 = (int)sig_to_new.size();
    if (n2 == nclasses) {
      cls = next;
      break;
    }
    nclasses = n2;
    cls = next;
  }

  // Canonical numbering: breadth-first from the start class, symbols in
  // sorted order.
  std::map<int, int> renum;
  std::deque<int> work{cls[start]};
  renum[cls[start]] = 0;
  std::vector<int> rep_of_class(nstates, -1);
  for (int s = 0; s < nstates; ++s)
    if (rep_of_class[cls[s]] < 0) rep_of_class[cls[s]] = s;
  while (!work.empty()) {
    int c = work.front();
    work.pop_front();
    int rep = rep_of_class[c];
    for (auto& a : symbols) {
      auto it = delta.find({rep, a});
      if (it == delta.end()) continue;
      int c2 = cls[it->second];
      if (!renum.count(c2)) {
        renum[c2] = (int)renum.size();
        work.push_back(c2);
      }
    }
  }

  Dfa out;
  out.states = (int)renum.size();
  out.start = 0;
  out.symbols = symbols;
  for (auto& [key, tgt] : delta) {
    auto cit = renum.find(cls[key.first]);
    if (cit == renum.end()) continue;   // unreachable class
    out.delta[{cit->second, key.second}] = renum.at(cls[tgt]);
  }
  return out;
}

}  // namespace

Dfa spec_to_dfa(const SpecPtr& phi0, bool extended) {
  SpecPtr phi = extended ? phi0 : spec_erase_down(phi0);

  std::set<std::string> symbols = spec_symbols(phi);
  if (extended && spec_has_down(phi0)) symbols.insert(kDown);

  Dfa out;
  out.symbols = symbols;
  // Empty language: its prefix closure is {epsilon} by convention, so the
  // automaton has the start state and nothing else.
  if (spec_is_empty(phi)) return out;

  // Derivative exploration.  Regexes are kept canonical by the smart
  // constructors, so the printed form is a usable state key and an empty
  // derivative is recognised syntactically.
  std::map<std::string, int> id;
  std::vector<SpecPtr> states;
  std::map<std::pair<int, std::string>, int> delta;
  auto intern = [&](const SpecPtr& s) {
    auto [it, fresh] = id.emplace(spec_print(s), (int)states.size());
    if (fresh) states.push_back(s);
    return it->second;
  };
  intern(phi);
  for (size_t i = 0; i < states.size(); ++i) {
    for (auto& a : symbols) {
      SpecPtr d = spec_deriv(states[i], a);
      if (spec_is_empty(d)) continue;   // dead state: prune the edge
      delta[{(int)i, a}] = intern(d);
    }
  }
  Dfa min = minimize((int)states.size(), 0, delta, symbols);
  return min;
}

bool dfa_accepts(const Dfa& d, const std::vector<std::string>& word) {
  int q = d.start;
  for (auto& a : word) {
    auto it = d.delta.find({q, a});
    if (it == d.delta.end()) return false;
    q = it->second;
  }
  return true;   // every live state accepts
}

std::vector<UnsafePattern> unsafe_conditions(const Net& net, const Dfa& dfa,
                                             bool extended) {
  std::vector<UnsafePattern> out;
  std::set<std::string> seen;
  for (auto& t : net.transitions) {
    if (t.label.kind != TLabel::Kind::Acc || t.label.name != net.res) continue;
    for (int q = 0; q < dfa.states; ++q) {
      if (dfa.delta.count({q, t.label.acc})) continue;
      std::string key = t.label.acc + ';' + std::to_string(q);
      for (int c : t.consume) key += ',' + std::to_string(c);
      if (!seen.insert(key).second) continue;
      UnsafePattern p;
      p.kind = UnsafePattern::Kind::Cover;
      p.cover = t.consume;
      p.q = q;
      p.symbol = t.label.acc;
      out.push_back(std::move(p));
    }
  }
  if (extended) {
    for (int q = 0; q < dfa.states; ++q) {
      if (dfa.delta.count({q, kDown})) continue;
      UnsafePattern p;
      p.kind = UnsafePattern::Kind::Disabled;
      p.q = q;
      p.symbol = kDown;
      out.push_back(std::move(p));
    }
  }
  return out;
}

namespace {

struct AState {
  std::vector<int> c;   // counters, cap value = "cap or more"
  int q = 0;
};

std::string astate_key(const AState& s) {
  std::string k = std::to_string(s.q);
  for (int v : s.c) {
    k += ',';
    k += std::to_string(v);
  }
  return k;
}

std::string print_astate(const AState& s, int cap) {
  std::string out;
  bool any = false;
  for (size_t j = 0; j < s.c.size(); ++j) {
    if (s.c[j] == 0) continue;
    if (any) out += " | ";
    any = true;
    out += s.c[j] == cap ? std::to_string(cap) + "+" : std::to_string(s.c[j]);
    out += "*" + std::to_string(j);
  }
  if (!any) out += "(empty)";
  out += " @ q" + std::to_string(s.q);
  return out;
}

}  // namespace

std::string abstract_key(const Marking& m, int q, int cap) {
  AState s;
  s.q = q;
  s.c.reserve(m.size());
  for (int v : m) s.c.push_back(v >= cap ? cap : v);
  return astate_key(s);
}

ReachResult abstract_reach(const Net& net, const Dfa& dfa,
                           const std::vector<UnsafePattern>& patterns,
                           int cap, long state_bound, bool collect) {
  ReachResult res;
  const int n = (int)net.places.size();

  // Per-place disabled predicate for the liveness pattern.
  std::set<Name> s2{net.res};
  for (auto& h : net.hidden) s2.erase(h);
  std::vector<char> dis(n);
  for (int j = 0; j < n; ++j) dis[j] = disabled(net.places[j], s2) ? 1 : 0;

  AState init;
  init.q = dfa.start;
  init.c.resize(n);
  for (int j = 0; j < n; ++j) {
    init.c[j] = net.initial[j] >= cap ? cap : net.initial[j];
    if (net.initial[j] >= cap) res.counter_abstracted = true;
  }

  auto matches = [&](const AState& s, const UnsafePattern& p) {
    if (s.q != p.q) return false;
    if (p.kind == UnsafePattern::Kind::Cover) {
      for (int j = 0; j < n; ++j)
        if (s.c[j] < p.cover[j] && s.c[j] != cap) return false;
      return true;
    }
    for (int j = 0; j < n; ++j)
      if (s.c[j] >= 1 && !dis[j]) return false;
    return true;
  };

  struct Visit {
    AState state;
    long parent;          // index into visits, -1 for the root
    std::string label;    // transition label that led here
  };
  std::vector<Visit> visits;
  std::map<std::string, long> seen;
  std::deque<long> work;

  visits.push_back({init, -1, ""});
  seen.emplace(astate_key(init), 0);
  work.push_back(0);

  auto report = [&](long idx, const UnsafePattern& p) {
    std::vector<std::string> path;
    for (long i = idx; i >= 0; i = visits[i].parent) {
      std::string line = print_astate(visits[i].state, cap);
      if (!visits[i].label.empty()) line = visits[i].label + " -> " + line;
      path.push_back(line);
    }
    std::reverse(path.begin(), path.end());
    path.push_back(p.kind == UnsafePattern::Kind::Cover
                       ? "access '" + p.symbol + "' enabled but not permitted here"
                       : "all tokens disabled but the spec still requires access");
    res.witness = std::move(path);
    res.unsafe = true;
  };

  while (!work.empty()) {
    long idx = work.front();
    work.pop_front();
    AState s = visits[idx].state;

    for (auto& p : patterns)
      if (matches(s, p)) {
        report(idx, p);
        res.abstract_states = (long)visits.size();
        if (collect)
          for (auto& kv : seen) res.visited.insert(kv.first);
        return res;
      }

    for (auto& t : net.transitions) {
      bool enabled = true;
      for (int j = 0; j < n; ++j)
        if (s.c[j] < t.consume[j] && s.c[j] != cap) {
          enabled = false;
          break;
        }
      if (!enabled) continue;

      int q2 = s.q;
      if (t.label.kind == TLabel::Kind::Acc && t.label.name == net.res) {
        auto it = dfa.delta.find({s.q, t.label.acc});
        if (it == dfa.delta.end()) continue;   // flagged by a pattern instead
        q2 = it->second;
      }
      AState s3;
      s3.q = q2;
      s3.c = s.c;
      for (int j = 0; j < n; ++j) {
        if (s3.c[j] == cap) continue;   // sticky: "cap or more" stays put
        int v = s3.c[j] - t.consume[j] + t.produce[j];
        if (v >= cap) {
          v = cap;
          res.counter_abstracted = true;
        }
        s3.c[j] = v;
      }
      std::string key = astate_key(s3);
      if (seen.count(key)) continue;
      if ((long)visits.size() >= state_bound) {
        res.state_bound = true;
        res.abstract_states = (long)visits.size();
        if (collect)
          for (auto& kv : seen) res.visited.insert(kv.first);
        return res;
      }
      seen.emplace(key, (long)visits.size());
      visits.push_back({std::move(s3), idx, print_tlabel(t.label)});
      work.push_back((long)visits.size() - 1);
    }
  }
  res.abstract_states = (long)visits.size();
  if (collect)
    for (auto& kv : seen) res.visited.insert(kv.first);
  return res;
}

CheckResult check_inclusion(const TraceObligation& ob,
                            const CheckOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.resource = ob.res;
  r.spec_name = ob.spec_name;

  BPtr projected = b_project(ob.body, {ob.res});
  NuLifted nl = lift_nu(projected);
  BPtr body = elim_scoping(nl.body);
  r.normalized = body;
  if (nl.approx) r.approximations.push_back("nu-lifted");

  Basis basis = basis_closure(body, nl.hidden, opt.atom_bound);
  r.net = build_net(basis, ob.res);
  r.dfa = spec_to_dfa(ob.spec, opt.extended);
  r.places = (long)r.net.places.size();
  r.transitions = (long)r.net.transitions.size();

  if (basis.atom_bound) {
    r.approximations.push_back("atom-bound");
    r.safe = false;
    r.witness = {"basis exceeded " + std::to_string(opt.atom_bound) +
                 " atoms; inclusion not verified"};
  } else {
    auto patterns = unsafe_conditions(r.net, r.dfa, opt.extended);
    ReachResult rr =
        abstract_reach(r.net, r.dfa, patterns, opt.cap, opt.state_bound);
    r.abstract_states = rr.abstract_states;
    if (rr.counter_abstracted) r.approximations.push_back("counter-abstracted");
    if (rr.state_bound) {
      r.approximations.push_back("state-bound");
      r.safe = false;
      r.witness = {"abstract state bound hit; inclusion not verified"};
    } else {
      r.safe = !rr.unsafe;
      r.witness = rr.witness;
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  r.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace rua
