// semantics.cpp - canonical states, one-step reduction, bounded exploration
#include "rua/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>

namespace rua {

// ---------------------------------------------------------------------------
// Canonical states.
// ---------------------------------------------------------------------------

namespace {

// Splits a process into binders and parallel components, recursively
// flattening only the top spine (never under prefixes or replication).
void flatten(const ProcPtr& p, std::vector<Binder>& binders,
             std::vector<ProcPtr>& comps) {
  switch (p->kind) {
    case Process::Kind::Nil:
      return;
    case Process::Kind::Par:
      flatten(p->a, binders, comps);
      flatten(p->b, binders, comps);
      return;
    case Process::Kind::Nu: {
      Binder b;
      b.kind = Binder::Kind::Chan;
      b.name = p->chan;
      binders.push_back(b);
      flatten(p->a, binders, comps);
      return;
    }
    case Process::Kind::NuR: {
      Binder b;
      b.kind = Binder::Kind::Res;
      b.name = p->chan;
      b.spec = p->spec;
      b.spec_name = p->spec_name;
      binders.push_back(b);
      flatten(p->a, binders, comps);
      return;
    }
    default:
      comps.push_back(p);
      return;
  }
}

// Picks a name not in `used`, preferring the base (text before the first
// '$') and then base$2, base$3, ...
Name pick_fresh(const Name& name, const std::set<Name>& used) {
  Name base = name.substr(0, name.find('$'));
  if (!used.count(base)) return base;
  for (int k = 2;; ++k) {
    Name cand = base + "$" + std::to_string(k);
    if (!used.count(cand)) return cand;
  }
}

// Renames every bound name inside `p` so that none collides with `used`,
// extending `used` as it goes.  `env` maps old names to new in scope.
ProcPtr uniq_bound(const ProcPtr& p, std::map<Name, Name> env,
                   std::set<Name>& used) {
  auto ren = [&](const Name& n) {
    auto it = env.find(n);
    return it == env.end() ? n : it->second;
  };
  auto renv = [&](const Value& v) {
    return v.kind == Value::Kind::Var ? v_var(ren(v.name)) : v;
  };
  switch (p->kind) {
    case Process::Kind::Nil:
      return p;
    case Process::Kind::Output: {
      std::vector<Value> args;
      for (auto& v : p->args) args.push_back(renv(v));
      return p_out(ren(p->chan), std::move(args), p->attr,
                   uniq_bound(p->a, env, used));
    }
    case Process::Kind::Input: {
      std::vector<Name> params;
      for (auto& y : p->params) {
        Name f = pick_fresh(y, used);
        used.insert(f);
        env[y] = f;
        params.push_back(f);
      }
      return p_in(ren(p->chan), std::move(params), p->attr,
                  uniq_bound(p->a, env, used));
    }
    case Process::Kind::Par:
      return p_par(uniq_bound(p->a, env, used), uniq_bound(p->b, env, used));
    case Process::Kind::If:
      return p_if(renv(p->cond), uniq_bound(p->a, env, used),
                  uniq_bound(p->b, env, used));
    case Process::Kind::Nu: {
      Name f = pick_fresh(p->chan, used);
      used.insert(f);
      env[p->chan] = f;
      return p_nu(f, uniq_bound(p->a, env, used));
    }
    case Process::Kind::Repl:
      return p_repl(uniq_bound(p->a, env, used));
    case Process::Kind::Acc:
      return p_acc(ren(p->chan), p->acc, uniq_bound(p->a, env, used));
    case Process::Kind::NuR: {
      Name f = pick_fresh(p->chan, used);
      used.insert(f);
      env[p->chan] = f;
      return p_nur(f, p->spec, p->spec_name, uniq_bound(p->a, env, used));
    }
  }
  return p;
}

}  // namespace

State canonicalize(const State& s) {
  // 1. Flatten every component's top spine, hoisting binders.
  State t;
  t.binders = s.binders;
  for (auto& c : s.comps) flatten(c, t.binders, t.comps);

  // 2. Rename binders and all bound names apart, deterministically.
  std::set<Name> used;
  for (auto& c : t.comps)
    for (auto& n : free_names(c)) used.insert(n);
  std::map<Name, Name> benv;
  for (auto& b : t.binders) {
    // Free occurrences of binder names are bound occurrences at this level;
    // remove them from `used` so a binder may keep its own name.
    used.erase(b.name);
  }
  for (auto& b : t.binders) {
    Name f = pick_fresh(b.name, used);
    used.insert(f);
    if (f != b.name) benv[b.name] = f;
    b.name = f;
  }
  if (!benv.empty()) {
    std::map<Name, Value> sub;
    for (auto& [o, n] : benv) sub[o] = v_var(n);
    for (auto& c : t.comps) c = subst_process(c, sub);
  }
  for (auto& c : t.comps) c = uniq_bound(c, {}, used);

  // 3. Drop inert components, sort for a canonical order.
  std::vector<ProcPtr> kept;
  for (auto& c : t.comps)
    if (c->kind != Process::Kind::Nil) kept.push_back(c);
  std::sort(kept.begin(), kept.end(), [](const ProcPtr& a, const ProcPtr& b) {
    return print_process(a) < print_process(b);
  });
  t.comps = std::move(kept);
  std::stable_sort(t.binders.begin(), t.binders.end(),
                   [](const Binder& a, const Binder& b) {
                     if (a.kind != b.kind) return a.kind < b.kind;
                     return a.name < b.name;
                   });
  return t;
}

State make_state(const ProcPtr& p) {
  State s;
  s.comps.push_back(p);
  return canonicalize(s);
}

std::string print_state(const State& s) {
  std::string out;
  for (auto& b : s.binders) {
    if (b.kind == Binder::Kind::Chan) {
      out += "[new " + b.name + "] ";
    } else {
      out += "[res " + b.name + ": pref(" + spec_print(b.spec) + ")] ";
    }
  }
  if (s.comps.empty()) {
    out += "0";
  } else {
    for (size_t i = 0; i < s.comps.size(); ++i) {
      if (i) out += " | ";
      out += print_process(s.comps[i]);
    }
  }
  return out;
}

std::string print_step_label(const StepLabel& l) {
  if (!l.is_access) return "tau";
  return l.res + "^" + l.acc;
}

// ---------------------------------------------------------------------------
// One-step reduction.
// ---------------------------------------------------------------------------

namespace {

struct Item {
  ProcPtr proc;
  int copy;    // -1: an original component; otherwise an unfolded-copy id
};

struct CopyCtx {
  std::vector<Binder> binders;
  std::vector<size_t> item_idx;    // indices into the item list
};

struct StepCtx {
  const State& s;
  std::vector<Item> items;
  std::vector<CopyCtx> copies;

  explicit StepCtx(const State& st) : s(st) {
    // Names already taken: binder names and everything free in components.
    std::set<Name> used;
    for (auto& b : st.binders) used.insert(b.name);
    for (auto& c : st.comps)
      for (auto& n : free_names(c)) used.insert(n);

    for (auto& c : st.comps) {
      if (c->kind == Process::Kind::Repl) {
        // Two unfolded copies allow a replication to synchronise with
        // itself; a single copy covers every other use.  Each copy's
        // hoisted binders are freshened now so merging them into the state
        // cannot capture anything.
        for (int k = 0; k < 2; ++k) {
          CopyCtx cc;
          int id = (int)copies.size();
          std::vector<ProcPtr> body;
          flatten(c->a, cc.binders, body);
          std::map<Name, Value> sub;
          for (auto& b : cc.binders) {
            Name f = pick_fresh(b.name, used);
            used.insert(f);
            if (f != b.name) sub[b.name] = v_var(f);
            b.name = f;
          }
          if (!sub.empty())
            for (auto& bp : body) bp = subst_process(bp, sub);
          for (auto& bp : body) {
            cc.item_idx.push_back(items.size());
            items.push_back({bp, id});
          }
          copies.push_back(std::move(cc));
        }
        items.push_back({c, -1});
      } else {
        items.push_back({c, -1});
      }
    }
  }

  // Builds the successor state: `consumed` maps item index -> residue;
  // `spec_update` optionally replaces one resource binder's language.
  State assemble(const std::map<size_t, ProcPtr>& consumed,
                 const std::optional<std::pair<Name, SpecPtr>>& spec_update) {
    std::set<int> touched;
    for (auto& [idx, r] : consumed) {
      (void)r;
      if (items[idx].copy >= 0) touched.insert(items[idx].copy);
    }
    State next;
    next.binders = s.binders;
    for (int id : touched)
      for (auto& b : copies[id].binders) next.binders.push_back(b);
    for (size_t i = 0; i < items.size(); ++i) {
      const Item& it = items[i];
      if (it.copy >= 0 && !touched.count(it.copy)) continue;
      auto c = consumed.find(i);
      next.comps.push_back(c != consumed.end() ? c->second : it.proc);
    }
    if (spec_update) {
      for (auto& b : next.binders)
        if (b.kind == Binder::Kind::Res && b.name == spec_update->first)
          b.spec = spec_update->second;
    }
    return canonicalize(next);
  }

  const Binder* find_res_binder(const Name& x, int copy) const {
    for (auto& b : s.binders)
      if (b.name == x) return b.kind == Binder::Kind::Res ? &b : nullptr;
    if (copy >= 0)
      for (auto& b : copies[copy].binders)
        if (b.name == x) return b.kind == Binder::Kind::Res ? &b : nullptr;
    return nullptr;
  }

  bool is_chan_bound(const Name& x, int copy) const {
    for (auto& b : s.binders)
      if (b.name == x) return b.kind == Binder::Kind::Chan;
    if (copy >= 0)
      for (auto& b : copies[copy].binders)
        if (b.name == x) return b.kind == Binder::Kind::Chan;
    return false;
  }
};

}  // namespace

std::vector<std::pair<StepLabel, State>> step(const State& s) {
  StepCtx ctx(s);
  std::vector<std::pair<StepLabel, State>> results;

  auto emit = [&](const StepLabel& l, State&& st) {
    results.emplace_back(l, std::move(st));
  };

  // Communications.
  for (size_t i = 0; i < ctx.items.size(); ++i) {
    const Item& oi = ctx.items[i];
    if (oi.proc->kind != Process::Kind::Output) continue;
    for (size_t j = 0; j < ctx.items.size(); ++j) {
      if (i == j) continue;
      const Item& ij = ctx.items[j];
      if (ij.proc->kind != Process::Kind::Input) continue;
      if (ij.proc->chan != oi.proc->chan) continue;
      if (ij.proc->params.size() != oi.proc->args.size()) continue;
      std::map<Name, Value> sub;
      for (size_t k = 0; k < ij.proc->params.size(); ++k)
        sub[ij.proc->params[k]] = oi.proc->args[k];
      std::map<size_t, ProcPtr> consumed;
      consumed[i] = oi.proc->a;
      consumed[j] = subst_process(ij.proc->a, sub);
      emit(StepLabel{}, ctx.assemble(consumed, std::nullopt));
    }
  }

  // Accesses and conditionals.
  for (size_t i = 0; i < ctx.items.size(); ++i) {
    const Item& it = ctx.items[i];
    if (it.proc->kind == Process::Kind::Acc) {
      const Name& x = it.proc->chan;
      std::map<size_t, ProcPtr> consumed;
      consumed[i] = it.proc->a;
      if (const Binder* b = ctx.find_res_binder(x, it.copy)) {
        SpecPtr residual = spec_deriv(b->spec, it.proc->acc);
        emit(StepLabel{},
             ctx.assemble(consumed, std::make_pair(x, residual)));
      } else if (!ctx.is_chan_bound(x, it.copy)) {
        StepLabel l;
        l.is_access = true;
        l.res = x;
        l.acc = it.proc->acc;
        emit(l, ctx.assemble(consumed, std::nullopt));
      }
      // Accessing a channel-bound name is stuck (ill-typed program).
    } else if (it.proc->kind == Process::Kind::If) {
      std::map<size_t, ProcPtr> consumed;
      if (it.proc->cond.kind != Value::Kind::False) {
        consumed[i] = it.proc->a;
        emit(StepLabel{}, ctx.assemble(consumed, std::nullopt));
      }
      if (it.proc->cond.kind != Value::Kind::True) {
        consumed.clear();
        consumed[i] = it.proc->b;
        emit(StepLabel{}, ctx.assemble(consumed, std::nullopt));
      }
    }
  }

  // Deduplicate against canonical prints, deterministic order.
  std::vector<std::pair<std::pair<std::string, std::string>, size_t>> keys;
  for (size_t i = 0; i < results.size(); ++i)
    keys.push_back(
        {{print_step_label(results[i].first), print_state(results[i].second)},
         i});
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<StepLabel, State>> out;
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i && keys[i].first == keys[i - 1].first) continue;
    out.push_back(std::move(results[keys[i].second]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Safety / liveness checks on states.
// ---------------------------------------------------------------------------

namespace {
bool proc_has_empty_res(const ProcPtr& p) {
  if (p->kind == Process::Kind::NuR && spec_is_empty(p->spec)) return true;
  if (p->a && proc_has_empty_res(p->a)) return true;
  if (p->b && proc_has_empty_res(p->b)) return true;
  return false;
}

void collect_exposed(const ProcPtr& p,
                     std::vector<std::pair<Name, SpecPtr>>& out) {
  switch (p->kind) {
    case Process::Kind::Par:
      collect_exposed(p->a, out);
      collect_exposed(p->b, out);
      return;
    case Process::Kind::Nu:
    case Process::Kind::Repl:
      collect_exposed(p->a, out);
      return;
    case Process::Kind::NuR:
      out.emplace_back(p->chan, p->spec);
      collect_exposed(p->a, out);
      return;
    default:
      return;
  }
}
}  // namespace

bool state_resource_safe(const State& s) {
  for (auto& b : s.binders)
    if (b.kind == Binder::Kind::Res && spec_is_empty(b.spec)) return false;
  for (auto& c : s.comps)
    if (proc_has_empty_res(c)) return false;
  return true;
}

std::vector<std::pair<Name, SpecPtr>> exposed_resource_specs(const State& s) {
  std::vector<std::pair<Name, SpecPtr>> out;
  for (auto& b : s.binders)
    if (b.kind == Binder::Kind::Res) out.emplace_back(b.name, b.spec);
  for (auto& c : s.comps)
    if (c->kind == Process::Kind::Repl) collect_exposed(c->a, out);
  return out;
}

// ---------------------------------------------------------------------------
// Bounded exploration.
// ---------------------------------------------------------------------------

ExploreResult explore(const ProcPtr& p, int depth, int budget,
                      bool check_liveness) {
  ExploreResult res;
  State init = make_state(p);
  std::map<std::string, int> index;
  std::vector<State> states;
  std::vector<int> dist;
  std::vector<int> parent;
  std::vector<std::string> via;

  auto add = [&](const State& st, int d, int par, const std::string& lab) {
    std::string key = print_state(st);
    auto it = index.find(key);
    if (it != index.end()) return -1;
    int id = (int)states.size();
    index.emplace(key, id);
    states.push_back(st);
    dist.push_back(d);
    parent.push_back(par);
    via.push_back(lab);
    return id;
  };
  auto witness_of = [&](int id) {
    std::vector<std::string> w;
    for (int cur = id; cur > 0; cur = parent[cur]) w.push_back(via[cur]);
    std::reverse(w.begin(), w.end());
    return w;
  };

  add(init, 0, -1, "");
  for (size_t i = 0; i < states.size(); ++i) {
    if ((int)states.size() > budget) {
      res.truncated = true;
      break;
    }
    const State st = states[i];
    if (!state_resource_safe(st)) {
      res.safety_violation = true;
      res.witness = witness_of((int)i);
      res.bad_state = print_state(st);
      break;
    }
    if (dist[i] >= depth) {
      res.truncated = true;
      continue;
    }
    auto succs = step(st);
    if (succs.empty() && check_liveness) {
      for (auto& [name, spec] : exposed_resource_specs(st)) {
        if (!spec_down_permitted(spec)) {
          res.liveness_violation = true;
          res.witness = witness_of((int)i);
          res.bad_state = print_state(st);
          break;
        }
      }
      if (res.liveness_violation) break;
    }
    for (auto& [l, st2] : succs)
      add(st2, dist[i] + 1, (int)i, print_step_label(l));
  }
  res.states = (int)states.size();
  return res;
}

std::set<std::vector<std::string>> process_traces(const ProcPtr& p,
                                                  const Name& x, int depth,
                                                  int budget) {
  std::set<std::vector<std::string>> words;
  words.emplace();
  State init = make_state(p);
  std::set<std::string> visited;
  std::deque<std::pair<State, std::vector<std::string>>> queue;
  std::deque<int> depths;
  auto key_of = [&](const State& st, const std::vector<std::string>& w) {
    std::string k = print_state(st);
    for (auto& s : w) k += "\x01" + s;
    return k;
  };
  queue.push_back({init, {}});
  depths.push_back(0);
  visited.insert(key_of(init, {}));
  int seen = 0;
  while (!queue.empty()) {
    auto [st, w] = queue.front();
    int d = depths.front();
    queue.pop_front();
    depths.pop_front();
    if (++seen > budget) break;
    if (d >= depth) continue;
    for (auto& [l, st2] : step(st)) {
      std::vector<std::string> w2 = w;
      if (l.is_access && l.res == x) {
        w2.push_back(l.acc);
        words.insert(w2);
      }
      std::string k = key_of(st2, w2);
      if (visited.insert(k).second) {
        queue.push_back({st2, w2});
        depths.push_back(d + 1);
      }
    }
  }
  return words;
}

}  // namespace rua
