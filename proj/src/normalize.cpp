// normalize.cpp - restriction lifting, scoping-operator elimination, and the
// finite atom basis used for net construction.
#include "rua/normalize.hpp"

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>

namespace rua {
namespace {

std::string set_key(const std::set<Name>& s) {
  std::string k;
  for (auto& n : s) {
    k += n;
    k += '\x01';
  }
  return k;
}

std::set<Name> restrict_to(const std::set<Name>& s, const std::set<Name>& keep) {
  std::set<Name> out;
  for (auto& n : s)
    if (keep.count(n)) out.insert(n);
  return out;
}

// Preimage of S under a renaming (identity outside the pair sources).
std::set<Name> inv_image(const std::vector<std::pair<Name, Name>>& pairs,
                         const std::set<Name>& S) {
  std::set<Name> out;
  std::set<Name> sources;
  for (auto& pr : pairs) {
    sources.insert(pr.first);
    if (S.count(pr.second)) out.insert(pr.first);
  }
  for (auto& n : S)
    if (!sources.count(n)) out.insert(n);
  return out;
}

// --------------------------------------------------------------------------
// Restriction lifting.
// --------------------------------------------------------------------------

struct NuLifter {
  std::vector<Name> hidden;
  bool approx = false;

  // `exact` is false under a replication or recursion, where hoisting a
  // binder shares one name among all copies.
  BPtr go(const BPtr& t, bool exact) {
    switch (t->kind) {
      case BType::Kind::Zero:
      case BType::Kind::Var:
        return t;
      case BType::Kind::Act:
        return b_act(t->act, t->attr, go(t->a, exact));
      case BType::Kind::Par:
        return b_par(go(t->a, exact), go(t->b, exact));
      case BType::Kind::Choice:
        return b_choice(go(t->a, exact), go(t->b, exact));
      case BType::Kind::Repl:
        return b_repl(go(t->a, false));
      case BType::Kind::Rec:
        return b_rec(t->name, go(t->a, false));
      case BType::Kind::Hide: {
        // Freshen, collect, and continue below the binder.
        Name f = fresh_name(t->name);
        hidden.push_back(f);
        if (!exact) approx = true;
        return go(b_apply_rename(t->a, {{t->name, f}}), exact);
      }
      case BType::Kind::Rename:
        // The hoisted names are fresh, so they commute with the renaming.
        return b_rename(t->pairs, go(t->a, exact));
      case BType::Kind::Exclude:
        // Fresh names are never in the exclusion set.
        return b_exclude(go(t->a, exact), t->names);
      case BType::Kind::Project: {
        // A binder crossing a projection must be kept visible below it:
        // (new r)(A) @ S  ==  (new r)(A @ (S + {r})).
        size_t before = hidden.size();
        BPtr a = go(t->a, exact);
        std::set<Name> s2 = t->names;
        for (size_t i = before; i < hidden.size(); ++i) s2.insert(hidden[i]);
        return b_project(a, s2);
      }
    }
    return t;
  }
};

// --------------------------------------------------------------------------
// Exclusion elimination: actions on names in the pending set become tau.
// --------------------------------------------------------------------------

struct ExcludeElim {
  std::map<std::string, Name> cache;   // (var, trimmed context) -> fresh mu
  std::map<Name, BPtr> defs;           // recursion variable -> its body

  std::string key_of(const Name& v, const std::set<Name>& S, const BPtr& body) {
    return v + '\x02' + set_key(restrict_to(S, btype_free_names(body)));
  }

  BPtr go(const BPtr& t, const std::set<Name>& S) {
    switch (t->kind) {
      case BType::Kind::Zero:
        return t;
      case BType::Kind::Act: {
        bool hit = t->act.kind != TAction::Kind::Tau && S.count(t->act.name);
        return b_act(hit ? act_tau() : t->act, t->attr, go(t->a, S));
      }
      case BType::Kind::Par:
        return b_par(go(t->a, S), go(t->b, S));
      case BType::Kind::Choice:
        return b_choice(go(t->a, S), go(t->b, S));
      case BType::Kind::Repl:
        return b_repl(go(t->a, S));
      case BType::Kind::Hide: {
        // Defensive (lifting has normally removed these): the freshened
        // bound name cannot be in S.
        Name f = fresh_name(t->name);
        return b_hide(f, go(b_apply_rename(t->a, {{t->name, f}}), S));
      }
      case BType::Kind::Rename:
        return b_rename(t->pairs, go(t->a, inv_image(t->pairs, S)));
      case BType::Kind::Exclude: {
        std::set<Name> s2 = S;
        s2.insert(t->names.begin(), t->names.end());
        return go(t->a, s2);
      }
      case BType::Kind::Project:
        // (A @ S') ^ S == (A ^ S) @ S': tau passes a projection unchanged.
        return b_project(go(t->a, S), t->names);
      case BType::Kind::Rec: {
        defs[t->name] = t->a;
        std::string key = key_of(t->name, S, t->a);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(t->a, S));
      }
      case BType::Kind::Var: {
        auto dit = defs.find(t->name);
        if (dit == defs.end()) return t;   // free variable: leave alone
        std::string key = key_of(t->name, S, dit->second);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(dit->second, S));
      }
    }
    return t;
  }
};

// --------------------------------------------------------------------------
// Projection elimination: actions outside the pending set become tau.
// An absent pending set means "keep everything".
// --------------------------------------------------------------------------

struct ProjectElim {
  using Ctx = std::optional<std::set<Name>>;
  std::map<std::string, Name> cache;
  std::map<Name, BPtr> defs;

  static std::string ctx_key(const Ctx& c, const BPtr& body) {
    if (!c) return "\x03all";
    return set_key(restrict_to(*c, btype_free_names(body)));
  }

  static Ctx through_rename(const std::vector<std::pair<Name, Name>>& pairs,
                            const Ctx& c) {
    if (!c) return c;
    return inv_image(pairs, *c);
  }

  BPtr go(const BPtr& t, const Ctx& c) {
    switch (t->kind) {
      case BType::Kind::Zero:
        return t;
      case BType::Kind::Act: {
        bool drop = c && t->act.kind != TAction::Kind::Tau &&
                    !c->count(t->act.name);
        return b_act(drop ? act_tau() : t->act, t->attr, go(t->a, c));
      }
      case BType::Kind::Par:
        return b_par(go(t->a, c), go(t->b, c));
      case BType::Kind::Choice:
        return b_choice(go(t->a, c), go(t->b, c));
      case BType::Kind::Repl:
        return b_repl(go(t->a, c));
      case BType::Kind::Hide: {
        // Defensive: a binder below a pending projection stays visible
        // inside its own scope.
        Name f = fresh_name(t->name);
        Ctx c2 = c;
        if (c2) c2->insert(f);
        return b_hide(f, go(b_apply_rename(t->a, {{t->name, f}}), c2));
      }
      case BType::Kind::Rename:
        return b_rename(t->pairs, go(t->a, through_rename(t->pairs, c)));
      case BType::Kind::Exclude:
        throw std::logic_error("projection pass saw an exclusion operator");
      case BType::Kind::Project: {
        Ctx c2;
        if (!c) {
          c2 = t->names;
        } else {
          c2 = restrict_to(t->names, *c);
        }
        return go(t->a, c2);
      }
      case BType::Kind::Rec: {
        defs[t->name] = t->a;
        std::string key = t->name + '\x02' + ctx_key(c, t->a);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(t->a, c));
      }
      case BType::Kind::Var: {
        auto dit = defs.find(t->name);
        if (dit == defs.end()) return t;
        std::string key = t->name + '\x02' + ctx_key(c, dit->second);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(dit->second, c));
      }
    }
    return t;
  }
};

// --------------------------------------------------------------------------
// Renaming elimination: the pending renaming is applied to every action.
// --------------------------------------------------------------------------

struct RenameElim {
  using Ctx = std::map<Name, Name>;   // source -> target, identities dropped
  std::map<std::string, Name> cache;
  std::map<Name, BPtr> defs;

  static Name apply(const Ctx& c, const Name& n) {
    auto it = c.find(n);
    return it == c.end() ? n : it->second;
  }

  static Ctx compose(const Ctx& outer,
                     const std::vector<std::pair<Name, Name>>& inner) {
    Ctx out;
    std::set<Name> inner_sources;
    for (auto& pr : inner) {
      inner_sources.insert(pr.first);
      Name d = apply(outer, pr.second);
      if (d != pr.first) out[pr.first] = d;
    }
    for (auto& [s, d] : outer)
      if (!inner_sources.count(s)) out[s] = d;
    return out;
  }

  static std::string ctx_key(const Ctx& c, const BPtr& body) {
    auto fn = btype_free_names(body);
    std::string k;
    for (auto& [s, d] : c) {
      if (!fn.count(s)) continue;
      k += s;
      k += '>';
      k += d;
      k += '\x01';
    }
    return k;
  }

  BPtr go(const BPtr& t, const Ctx& c) {
    switch (t->kind) {
      case BType::Kind::Zero:
        return t;
      case BType::Kind::Act: {
        TAction a = t->act;
        if (a.kind != TAction::Kind::Tau) a.name = apply(c, a.name);
        return b_act(a, t->attr, go(t->a, c));
      }
      case BType::Kind::Par:
        return b_par(go(t->a, c), go(t->b, c));
      case BType::Kind::Choice:
        return b_choice(go(t->a, c), go(t->b, c));
      case BType::Kind::Repl:
        return b_repl(go(t->a, c));
      case BType::Kind::Hide: {
        // Defensive: the fresh bound name is untouched by the renaming.
        Name f = fresh_name(t->name);
        return b_hide(f, go(b_apply_rename(t->a, {{t->name, f}}), c));
      }
      case BType::Kind::Rename:
        return go(t->a, compose(c, t->pairs));
      case BType::Kind::Exclude:
        throw std::logic_error("renaming pass saw an exclusion operator");
      case BType::Kind::Project:
        throw std::logic_error("renaming pass saw a projection operator");
      case BType::Kind::Rec: {
        defs[t->name] = t->a;
        std::string key = t->name + '\x02' + ctx_key(c, t->a);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(t->a, c));
      }
      case BType::Kind::Var: {
        auto dit = defs.find(t->name);
        if (dit == defs.end()) return t;
        std::string key = t->name + '\x02' + ctx_key(c, dit->second);
        auto it = cache.find(key);
        if (it != cache.end()) return b_var(it->second);
        Name u = fresh_name(t->name);
        cache.emplace(key, u);
        return b_rec(u, go(dit->second, c));
      }
    }
    return t;
  }
};

}  // namespace

NuLifted lift_nu(const BPtr& t) {
  NuLifter l;
  NuLifted out;
  out.body = l.go(t, true);
  out.hidden = std::move(l.hidden);
  out.approx = l.approx;
  return out;
}

BPtr elim_exclude(const BPtr& t) {
  ExcludeElim e;
  return e.go(t, {});
}

BPtr elim_project(const BPtr& t) {
  ProjectElim e;
  return e.go(t, std::nullopt);
}

BPtr elim_rename(const BPtr& t) {
  RenameElim e;
  return e.go(t, {});
}

BPtr elim_scoping(const BPtr& t) {
  return elim_rename(elim_project(elim_exclude(t)));
}

std::vector<BPtr> par_leaves(const BPtr& t) {
  std::vector<BPtr> out;
  std::function<void(const BPtr&)> go = [&](const BPtr& u) {
    if (!u || u->kind == BType::Kind::Zero) return;
    if (u->kind == BType::Kind::Par) {
      go(u->a);
      go(u->b);
      return;
    }
    out.push_back(u);
  };
  go(t);
  return out;
}

namespace {

// Folding registry: the one-step unfolding of every recursive definition
// seen so far, keyed by its print.
struct FoldState {
  std::map<std::string, BPtr> registry;
  std::set<std::string> scanned;

  void register_recs(const BPtr& t) {
    if (!t) return;
    if (t->kind == BType::Kind::Rec) {
      std::string self = print_btype(t);
      if (scanned.insert(self).second) {
        BPtr unf = b_subst_var(t->a, t->name, t);
        registry.emplace(print_btype(unf), t);   // first definition wins
      }
    }
    register_recs(t->a);
    register_recs(t->b);
  }

  // Bottom-up: fold children, rebuild, then collapse a term equal to a
  // known unfolding back to its definition.  Recursive definitions are
  // already folded and are left untouched (no rewriting under binders).
  BPtr fold(const BPtr& t) const {
    if (!t) return t;
    switch (t->kind) {
      case BType::Kind::Zero:
      case BType::Kind::Var:
      case BType::Kind::Rec:
        return t;
      default:
        break;
    }
    BPtr r;
    switch (t->kind) {
      case BType::Kind::Act:
        r = b_act(t->act, t->attr, fold(t->a));
        break;
      case BType::Kind::Par:
        r = b_par(fold(t->a), fold(t->b));
        break;
      case BType::Kind::Choice:
        r = b_choice(fold(t->a), fold(t->b));
        break;
      case BType::Kind::Repl:
        r = b_repl(fold(t->a));
        break;
      case BType::Kind::Hide:
        r = b_hide(t->name, fold(t->a));
        break;
      case BType::Kind::Rename:
        r = b_rename(t->pairs, fold(t->a));
        break;
      case BType::Kind::Exclude:
        r = b_exclude(fold(t->a), t->names);
        break;
      case BType::Kind::Project:
        r = b_project(fold(t->a), t->names);
        break;
      default:
        r = t;
        break;
    }
    auto it = registry.find(print_btype(r));
    return it != registry.end() ? it->second : r;
  }
};

}  // namespace

Basis basis_closure(const BPtr& t, const std::vector<Name>& hidden,
                    int bound) {
  Basis B;
  B.hidden = hidden;
  FoldState fs;

  // Register first, fold second: a term must be matched against the
  // definitions it itself contains.
  auto intern = [&](const BPtr& raw) {
    fs.register_recs(raw);
    BPtr folded = fs.fold(raw);
    std::vector<int> ids;
    for (auto& leaf : par_leaves(folded)) {
      std::string key = print_btype(leaf);
      auto it = B.index.find(key);
      int id;
      if (it == B.index.end()) {
        id = static_cast<int>(B.atoms.size());
        B.atoms.push_back(leaf);
        B.index.emplace(key, id);
      } else {
        id = it->second;
      }
      ids.push_back(id);
    }
    return ids;
  };

  B.initial = intern(t);
  size_t next = 0;
  while (next < B.atoms.size()) {
    if (static_cast<int>(B.atoms.size()) > bound) {
      B.atom_bound = true;
      break;
    }
    BPtr a = B.atoms[next];
    std::vector<AtomSucc> ss;
    for (auto& [lbl, target] : tstep(a)) {
      // Complementary pairs never fire at top level (every remaining
      // channel is restricted); their synchronised form is already a tau.
      if (lbl.kind == TLabel::Kind::Pair) continue;
      ss.push_back({lbl, intern(target)});
    }
    B.succs.push_back(std::move(ss));
    ++next;
  }
  B.succs.resize(B.atoms.size());
  return B;
}

}  // namespace rua
