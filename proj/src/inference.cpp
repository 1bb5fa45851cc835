// inference.cpp - constraint generation, unification, constraint closure
#include "rua/inference.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

namespace rua {

VTypePtr vt_bool() {
  auto t = std::make_shared<VType>();
  t->kind = VType::Kind::Bool;
  return t;
}
VTypePtr vt_res() {
  auto t = std::make_shared<VType>();
  t->kind = VType::Kind::Res;
  return t;
}
VTypePtr vt_var(int id) {
  auto t = std::make_shared<VType>();
  t->kind = VType::Kind::Var;
  t->id = id;
  return t;
}
VTypePtr vt_chan(std::vector<std::pair<Name, VTypePtr>> params,
                 const Name& body_var) {
  auto t = std::make_shared<VType>();
  t->kind = VType::Kind::Chan;
  t->params = std::move(params);
  t->body_var = body_var;
  return t;
}

std::string print_vtype(const VTypePtr& t) {
  switch (t->kind) {
    case VType::Kind::Bool:
      return "bool";
    case VType::Kind::Res:
      return "res";
    case VType::Kind::Var:
      return "t" + std::to_string(t->id);
    case VType::Kind::Chan: {
      std::string s = "ch((";
      for (size_t i = 0; i < t->params.size(); ++i) {
        if (i) s += ", ";
        s += t->params[i].first + ": " + print_vtype(t->params[i].second);
      }
      return s + ") " + t->body_var + ")";
    }
  }
  return "?";
}

namespace {

using RenPairs = std::vector<std::pair<Name, Name>>;

// Compose renamings: apply `inner` first, then `outer`.
RenPairs compose(const RenPairs& outer, const RenPairs& inner) {
  auto app = [](const RenPairs& ps, const Name& n) {
    for (auto& pr : ps)
      if (pr.first == n) return pr.second;
    return n;
  };
  RenPairs out;
  std::set<Name> inner_sources;
  for (auto& pr : inner) {
    Name t = app(outer, pr.second);
    if (t != pr.first) out.emplace_back(pr.first, t);
    inner_sources.insert(pr.first);
  }
  for (auto& pr : outer)
    if (!inner_sources.count(pr.first)) out.push_back(pr);
  return out;
}

RenPairs invert(const RenPairs& ps) {
  RenPairs out;
  for (auto& pr : ps) out.emplace_back(pr.second, pr.first);
  return out;
}

struct Inferencer {
  int next_tvar = 0;
  int next_bvar;
  int next_param = 0;
  explicit Inferencer(int seed) : next_bvar(seed) {}

  // Value-type unification state.
  std::map<int, VTypePtr> binding;
  // Behavioral-variable aliasing: var -> (rename, representative).
  std::map<Name, std::pair<RenPairs, Name>> alias;

  std::vector<SubConstraint> subs;
  std::vector<TraceObligation> obligations;
  std::vector<Name> bvar_order;    // emission order of behavioral variables

  Name fresh_bvar() {
    Name v = "$" + std::to_string(++next_bvar);
    bvar_order.push_back(v);
    return v;
  }
  VTypePtr fresh_tvar() { return vt_var(++next_tvar); }
  Name fresh_param() { return "p$" + std::to_string(++next_param); }

  VTypePtr find(VTypePtr t) {
    while (t->kind == VType::Kind::Var) {
      auto it = binding.find(t->id);
      if (it == binding.end()) break;
      t = it->second;
    }
    return t;
  }

  std::pair<RenPairs, Name> find_bvar(const Name& v) {
    auto it = alias.find(v);
    if (it == alias.end()) return {{}, v};
    auto [inner_pairs, root] = find_bvar(it->second.second);
    // v = pairs(alias target); the target itself resolves via inner_pairs.
    RenPairs total = compose(it->second.first, inner_pairs);
    // Path compression.
    it->second = {total, root};
    return {total, root};
  }

  bool occurs(int id, const VTypePtr& t0) {
    VTypePtr t = find(t0);
    if (t->kind == VType::Kind::Var) return t->id == id;
    if (t->kind == VType::Kind::Chan)
      for (auto& [n, pt] : t->params)
        if (occurs(id, pt)) return true;
    return false;
  }

  void unify(const VTypePtr& a0, const VTypePtr& b0) {
    VTypePtr a = find(a0), b = find(b0);
    if (a->kind == VType::Kind::Var && b->kind == VType::Kind::Var &&
        a->id == b->id)
      return;
    if (a->kind == VType::Kind::Var) {
      if (occurs(a->id, b))
        throw TypeError("occurs check failed: recursive value type");
      binding[a->id] = b;
      return;
    }
    if (b->kind == VType::Kind::Var) {
      unify(b, a);
      return;
    }
    if (a->kind != b->kind)
      throw TypeError("type mismatch: " + print_vtype(a) + " vs " +
                      print_vtype(b));
    if (a->kind == VType::Kind::Chan) {
      if (a->params.size() != b->params.size())
        throw TypeError("channel arity mismatch: " + print_vtype(a) + " vs " +
                        print_vtype(b));
      for (size_t i = 0; i < a->params.size(); ++i)
        unify(a->params[i].second, b->params[i].second);
      // Identify the channel bodies: b expressed through a's formals.
      auto [ra_pairs, ra] = find_bvar(a->body_var);
      auto [rb_pairs, rb] = find_bvar(b->body_var);
      if (ra == rb) return;
      RenPairs formals;
      for (size_t i = 0; i < a->params.size(); ++i)
        if (a->params[i].first != b->params[i].first)
          formals.emplace_back(a->params[i].first, b->params[i].first);
      // b.body = [a-formals -> b-formals] a.body, hence
      // rb = invert(rb_pairs) . formals . ra_pairs applied to ra.
      RenPairs total = compose(invert(rb_pairs), compose(formals, ra_pairs));
      alias[rb] = {total, ra};
    }
  }

  // --- environments ---------------------------------------------------------

  using Env = std::map<Name, VTypePtr>;

  Env merge(const Env& a, const Env& b) {
    Env out = a;
    for (auto& [n, t] : b) {
      auto it = out.find(n);
      if (it == out.end()) {
        out.emplace(n, t);
      } else {
        unify(it->second, t);
      }
    }
    return out;
  }

  // --- constraint generation -------------------------------------------------

  std::pair<Env, VTypePtr> ptv(const Value& v) {
    if (v.kind == Value::Kind::Var) {
      VTypePtr r = fresh_tvar();
      return {Env{{v.name, r}}, r};
    }
    return {Env{}, vt_bool()};
  }

  std::pair<Env, BPtr> pt(const ProcPtr& p) {
    switch (p->kind) {
      case Process::Kind::Nil:
        return {Env{}, b_zero()};
      case Process::Kind::Output: {
        auto [env0, a0] = pt(p->a);
        Env env = env0;
        std::vector<std::pair<Name, VTypePtr>> formals;
        RenPairs pairs;
        for (auto& arg : p->args) {
          auto [envv, tv] = ptv(arg);
          env = merge(env, envv);
          Name formal = fresh_param();
          formals.emplace_back(formal, tv);
          if (arg.kind == Value::Kind::Var)
            pairs.emplace_back(formal, arg.name);
        }
        Name beta = fresh_bvar();
        VTypePtr chan = vt_chan(std::move(formals), beta);
        env = merge(env, Env{{p->chan, chan}});
        BPtr granted = b_rename(pairs, b_var(beta));
        return {env, b_act(act_out(p->chan), p->attr, b_par(granted, a0))};
      }
      case Process::Kind::Input: {
        auto [env0, a0] = pt(p->a);
        std::vector<std::pair<Name, VTypePtr>> formals;
        for (auto& y : p->params) {
          auto it = env0.find(y);
          formals.emplace_back(y, it != env0.end() ? it->second : fresh_tvar());
        }
        Name beta = fresh_bvar();
        VTypePtr chan = vt_chan(std::move(formals), beta);
        Env env = env0;
        for (auto& y : p->params) env.erase(y);
        env = merge(env, Env{{p->chan, chan}});
        std::set<Name> ys(p->params.begin(), p->params.end());
        if (!p->params.empty()) {
          // The receiver of the transmitted names may use them as the
          // continuation does; with nothing transmitted there is nothing to
          // transfer and the body variable stays unconstrained.
          subs.push_back({beta, b_project(a0, ys)});
        }
        return {env, b_act(act_in(p->chan), p->attr, b_exclude(a0, ys))};
      }
      case Process::Kind::Par: {
        auto [env0, a0] = pt(p->a);
        auto [env1, a1] = pt(p->b);
        return {merge(env0, env1), b_par(a0, a1)};
      }
      case Process::Kind::If: {
        auto [envc, tc] = ptv(p->cond);
        unify(tc, vt_bool());
        auto [env0, a0] = pt(p->a);
        auto [env1, a1] = pt(p->b);
        return {merge(envc, merge(env0, env1)), b_choice(a0, a1)};
      }
      case Process::Kind::Nu: {
        auto [env0, a0] = pt(p->a);
        auto it = env0.find(p->chan);
        if (it != env0.end()) {
          VTypePtr t = find(it->second);
          if (t->kind == VType::Kind::Bool || t->kind == VType::Kind::Res)
            throw TypeError("name " + p->chan + " restricted as a channel " +
                            "but used as " + print_vtype(t));
        }
        Env env = env0;
        env.erase(p->chan);
        return {env, b_hide(p->chan, a0)};
      }
      case Process::Kind::Repl: {
        auto [env0, a0] = pt(p->a);
        return {env0, b_repl(a0)};
      }
      case Process::Kind::Acc: {
        auto [env0, a0] = pt(p->a);
        Env env = merge(env0, Env{{p->chan, vt_res()}});
        return {env, b_act(act_acc(p->chan, p->acc), Attr::None, a0)};
      }
      case Process::Kind::NuR: {
        auto [env0, a0] = pt(p->a);
        auto it = env0.find(p->chan);
        if (it != env0.end()) unify(it->second, vt_res());
        Env env = env0;
        env.erase(p->chan);
        obligations.push_back({p->chan, a0, p->spec, p->spec_name});
        return {env, b_exclude(a0, {p->chan})};
      }
    }
    return {Env{}, b_zero()};
  }

  // --- closure ---------------------------------------------------------------

  // Rewrites every behavioral variable to its representative (wrapped in
  // the accumulated renaming).
  BPtr resolve_vars(const BPtr& t) {
    switch (t->kind) {
      case BType::Kind::Zero:
        return t;
      case BType::Kind::Var: {
        auto [pairs, root] = find_bvar(t->name);
        return b_rename(pairs, b_var(root));
      }
      case BType::Kind::Act:
        return b_act(t->act, t->attr, resolve_vars(t->a));
      case BType::Kind::Par:
        return b_par(resolve_vars(t->a), resolve_vars(t->b));
      case BType::Kind::Choice:
        return b_choice(resolve_vars(t->a), resolve_vars(t->b));
      case BType::Kind::Repl:
        return b_repl(resolve_vars(t->a));
      case BType::Kind::Hide:
        return b_hide(t->name, resolve_vars(t->a));
      case BType::Kind::Rename:
        return b_rename(t->pairs, resolve_vars(t->a));
      case BType::Kind::Exclude:
        return b_exclude(resolve_vars(t->a), t->names);
      case BType::Kind::Project:
        return b_project(resolve_vars(t->a), t->names);
      case BType::Kind::Rec:
        return b_rec(t->name, resolve_vars(t->a));
    }
    return t;
  }

  // Least solutions of the (resolved) subtype constraints, computed over
  // strongly connected components of the variable dependency graph; cycles
  // become nested recursion.
  std::map<Name, BPtr> close_constraints(std::vector<SubConstraint>& resolved) {
    // Group bodies per representative, in first-emission order.
    std::vector<Name> order;
    std::map<Name, BPtr> grouped;
    for (auto& sc : resolved) {
      auto it = grouped.find(sc.var);
      if (it == grouped.end()) {
        grouped[sc.var] = sc.body;
        order.push_back(sc.var);
      } else {
        it->second = b_choice(it->second, sc.body);
      }
    }

    // Dependencies among constrained variables; unconstrained variables
    // solve to Zero immediately (least solution of var >= var).
    std::map<Name, BPtr> solved;
    auto deps_of = [&](const BPtr& b) {
      std::vector<Name> ds;
      for (auto& v : free_btype_vars(b))
        if (grouped.count(v)) ds.push_back(v);
      return ds;
    };

    // Tarjan over the `order` vertices.
    std::map<Name, int> index, low;
    std::map<Name, bool> on_stack;
    std::vector<Name> stack;
    std::vector<std::vector<Name>> sccs;
    int counter = 0;
    std::function<void(const Name&)> strongconnect = [&](const Name& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (auto& w : deps_of(grouped[v])) {
        if (!index.count(w)) {
          strongconnect(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<Name> scc;
        for (;;) {
          Name w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          scc.push_back(w);
          if (w == v) break;
        }
        std::sort(scc.begin(), scc.end());
        sccs.push_back(std::move(scc));
      }
    };
    for (auto& v : order)
      if (!index.count(v)) strongconnect(v);
    // Tarjan emits components in reverse topological order: dependencies
    // of a component appear before it.

    auto subst_solved = [&](BPtr b) {
      for (auto& v : free_btype_vars(b)) {
        auto it = solved.find(v);
        if (it != solved.end()) b = b_subst_var(b, v, it->second);
        else if (!grouped.count(v)) b = b_subst_var(b, v, b_zero());
      }
      return b;
    };

    std::function<void(std::vector<Name>, std::map<Name, BPtr>)> bekic =
        [&](std::vector<Name> vars, std::map<Name, BPtr> bodies) {
          if (vars.size() == 1) {
            const Name& v = vars[0];
            solved[v] = b_rec(v, bodies[v]);
            return;
          }
          Name vk = vars.back();
          vars.pop_back();
          BPtr closed_k = b_rec(vk, bodies[vk]);
          std::map<Name, BPtr> rest;
          for (auto& v : vars) rest[v] = b_subst_var(bodies[v], vk, closed_k);
          bekic(vars, rest);
          BPtr bk = bodies[vk];
          for (auto& v : vars) bk = b_subst_var(bk, v, solved[v]);
          solved[vk] = b_rec(vk, bk);
        };

    for (auto& scc : sccs) {
      std::map<Name, BPtr> bodies;
      for (auto& v : scc) bodies[v] = subst_solved(grouped[v]);
      bekic(scc, bodies);
    }
    return solved;
  }

  static std::set<Name> free_btype_vars(const BPtr& t) {
    std::set<Name> out;
    std::function<void(const BPtr&, std::set<Name>&)> go =
        [&](const BPtr& u, std::set<Name>& bound) {
          if (!u) return;
          if (u->kind == BType::Kind::Var) {
            if (!bound.count(u->name)) out.insert(u->name);
            return;
          }
          if (u->kind == BType::Kind::Rec) {
            std::set<Name> b2 = bound;
            b2.insert(u->name);
            go(u->a, b2);
            return;
          }
          go(u->a, bound);
          go(u->b, bound);
        };
    std::set<Name> bound;
    go(t, bound);
    return out;
  }
};

}  // namespace

InferResult infer(const Program& prog, int seed) {
  Inferencer inf(seed);
  auto [env, type] = inf.pt(prog.proc);

  InferResult res;
  res.raw_type = type;
  res.raw_subs = inf.subs;

  // Resolve variable aliases introduced by unification.
  std::vector<SubConstraint> resolved;
  for (auto& sc : inf.subs) {
    auto [pairs, root] = inf.find_bvar(sc.var);
    // var = [pairs] root, so  root >= [pairs^-1] body.
    resolved.push_back({root, b_rename(invert(pairs), inf.resolve_vars(sc.body))});
  }
  auto solved = inf.close_constraints(resolved);

  auto close = [&](BPtr b) {
    b = inf.resolve_vars(b);
    // Substitute in reverse topological order: `solved` bodies are closed.
    for (auto& v : Inferencer::free_btype_vars(b)) {
      auto it = solved.find(v);
      b = b_subst_var(b, v, it != solved.end() ? it->second : b_zero());
    }
    return b;
  };

  res.type = close(type);
  for (auto& ob : inf.obligations)
    res.obligations.push_back(
        {ob.res, close(ob.body), ob.spec, ob.spec_name});
  for (auto& [n, t] : env) res.env[n] = inf.find(t);
  return res;
}

}  // namespace rua
