// behavior.cpp - behavioral type constructors, transitions, disabledness,
// bounded traces, weak simulation
#include "rua/behavior.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <deque>
#include <functional>

namespace rua {

// ---------------------------------------------------------------------------
// Actions and labels.
// ---------------------------------------------------------------------------

TAction act_out(const Name& n) {
  TAction a;
  a.kind = TAction::Kind::Out;
  a.name = n;
  return a;
}
TAction act_in(const Name& n) {
  TAction a;
  a.kind = TAction::Kind::In;
  a.name = n;
  return a;
}
TAction act_acc(const Name& n, const std::string& label) {
  TAction a;
  a.kind = TAction::Kind::Acc;
  a.name = n;
  a.acc = label;
  return a;
}
TAction act_tau() { return TAction{}; }
bool operator==(const TAction& a, const TAction& b) {
  return a.kind == b.kind && a.name == b.name && a.acc == b.acc;
}

TLabel tl_out(const Name& n) {
  TLabel l;
  l.kind = TLabel::Kind::Out;
  l.name = n;
  return l;
}
TLabel tl_in(const Name& n) {
  TLabel l;
  l.kind = TLabel::Kind::In;
  l.name = n;
  return l;
}
TLabel tl_acc(const Name& n, const std::string& label) {
  TLabel l;
  l.kind = TLabel::Kind::Acc;
  l.name = n;
  l.acc = label;
  return l;
}
TLabel tl_tau() { return TLabel{}; }
TLabel tl_pair(const Name& in_side, const Name& out_side) {
  TLabel l;
  l.kind = TLabel::Kind::Pair;
  l.name = in_side;
  l.other = out_side;
  return l;
}

// Built-in labels are shown as words in reports, matching the shorthand
// access prefixes of the input language.
static std::string acc_word(const std::string& label) {
  if (label == "I") return "init";
  if (label == "R") return "read";
  if (label == "W") return "write";
  if (label == "C") return "close";
  return label;
}

std::string print_tlabel(const TLabel& l) {
  switch (l.kind) {
    case TLabel::Kind::Out:
      return l.name + "!";
    case TLabel::Kind::In:
      return l.name + "?";
    case TLabel::Kind::Acc:
      return "(" + l.name + "," + acc_word(l.acc) + ")";
    case TLabel::Kind::Tau:
      return "tau";
    case TLabel::Kind::Pair:
      return "{" + l.name + "?," + l.other + "!}";
  }
  return "?";
}

std::set<Name> tlabel_targets(const TLabel& l) {
  switch (l.kind) {
    case TLabel::Kind::Tau:
      return {};
    case TLabel::Kind::Pair:
      return {l.name, l.other};
    default:
      return {l.name};
  }
}

// ---------------------------------------------------------------------------
// Constructors.
// ---------------------------------------------------------------------------

namespace {
std::shared_ptr<BType> bmk(BType::Kind k) {
  auto t = std::make_shared<BType>();
  t->kind = k;
  return t;
}

}  // namespace

BPtr b_zero() {
  static BPtr z = bmk(BType::Kind::Zero);
  return z;
}

BPtr b_act(const TAction& act, Attr attr, BPtr cont) {
  auto t = bmk(BType::Kind::Act);
  t->act = act;
  t->attr = attr;
  t->a = cont ? std::move(cont) : b_zero();
  return t;
}

BPtr b_par(BPtr a, BPtr b) {
  if (a->kind == BType::Kind::Zero) return b;
  if (b->kind == BType::Kind::Zero) return a;
  auto t = bmk(BType::Kind::Par);
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

BPtr b_choice(BPtr a, BPtr b) {
  if (btype_eq(a, b)) return a;
  auto t = bmk(BType::Kind::Choice);
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

BPtr b_repl(BPtr a) {
  if (a->kind == BType::Kind::Zero) return a;
  if (a->kind == BType::Kind::Repl) return a;
  auto t = bmk(BType::Kind::Repl);
  t->a = std::move(a);
  return t;
}

BPtr b_hide(const Name& n, BPtr a) {
  // An open type (free recursion variables) may grow new occurrences when a
  // variable is solved, so name-based pruning only applies to closed types.
  if (a->kind == BType::Kind::Zero) return a;
  if (btype_free_vars(a).empty() && !btype_free_names(a).count(n)) return a;
  auto t = bmk(BType::Kind::Hide);
  t->name = n;
  t->a = std::move(a);
  return t;
}

BPtr b_rename(std::vector<std::pair<Name, Name>> pairs, BPtr a) {
  if (a->kind == BType::Kind::Zero) return a;
  bool open = !btype_free_vars(a).empty();
  std::set<Name> fns = open ? std::set<Name>{} : btype_free_names(a);
  std::vector<std::pair<Name, Name>> kept;
  std::set<Name> seen;
  for (auto& pr : pairs) {
    if (pr.first == pr.second) continue;
    if (!open && !fns.count(pr.first)) continue;
    if (seen.count(pr.first)) continue;    // leftmost binding wins
    seen.insert(pr.first);
    kept.push_back(pr);
  }
  if (kept.empty()) return a;
  auto t = bmk(BType::Kind::Rename);
  t->pairs = std::move(kept);
  t->a = std::move(a);
  return t;
}

BPtr b_exclude(BPtr a, std::set<Name> names) {
  if (a->kind == BType::Kind::Zero) return a;
  std::set<Name> kept;
  if (!btype_free_vars(a).empty()) {
    kept = std::move(names);
  } else {
    std::set<Name> fns = btype_free_names(a);
    for (auto& n : names)
      if (fns.count(n)) kept.insert(n);
  }
  if (kept.empty()) return a;
  auto t = bmk(BType::Kind::Exclude);
  t->names = std::move(kept);
  t->a = std::move(a);
  return t;
}

BPtr b_project(BPtr a, std::set<Name> names) {
  if (a->kind == BType::Kind::Zero) return a;
  if (btype_free_vars(a).empty()) {
    std::set<Name> fns = btype_free_names(a);
    bool covers = true;
    for (auto& n : fns)
      if (!names.count(n)) {
        covers = false;
        break;
      }
    if (covers) return a;    // keeps every action: identity
  }
  auto t = bmk(BType::Kind::Project);
  t->names = std::move(names);
  t->a = std::move(a);
  return t;
}

BPtr b_rec(const Name& var, BPtr a) {
  if (a->kind == BType::Kind::Var && a->name == var) return b_zero();
  if (!btype_free_vars(a).count(var)) return a;
  auto t = bmk(BType::Kind::Rec);
  t->name = var;
  t->a = std::move(a);
  return t;
}

BPtr b_var(const Name& var) {
  auto t = bmk(BType::Kind::Var);
  t->name = var;
  return t;
}

// ---------------------------------------------------------------------------
// Printing.
// ---------------------------------------------------------------------------

std::string print_btype(const BPtr& t) {
  switch (t->kind) {
    case BType::Kind::Zero:
      return "O";
    case BType::Kind::Var:
      return t->name;
    case BType::Kind::Act: {
      std::string p;
      switch (t->act.kind) {
        case TAction::Kind::Out:
          p = t->act.name + (t->attr == Attr::Succeeds ? "!!" : "!");
          break;
        case TAction::Kind::In:
          p = t->act.name + (t->attr == Attr::Succeeds ? "??" : "?");
          break;
        case TAction::Kind::Acc:
          p = "acc(" + t->act.name + ", " + acc_word(t->act.acc) + ")";
          break;
        case TAction::Kind::Tau:
          p = t->attr == Attr::Succeeds ? "tau!!" : "tau";
          break;
      }
      return p + ". " + print_btype(t->a);
    }
    case BType::Kind::Par:
      return "(" + print_btype(t->a) + " | " + print_btype(t->b) + ")";
    case BType::Kind::Choice:
      return "(" + print_btype(t->a) + " & " + print_btype(t->b) + ")";
    case BType::Kind::Repl:
      return "*(" + print_btype(t->a) + ")";
    case BType::Kind::Hide:
      return "(new " + t->name + ")(" + print_btype(t->a) + ")";
    case BType::Kind::Rename: {
      std::string d, s;
      for (size_t i = 0; i < t->pairs.size(); ++i) {
        if (i) {
          d += ",";
          s += ",";
        }
        d += t->pairs[i].second;
        s += t->pairs[i].first;
      }
      return "[" + d + "/" + s + "](" + print_btype(t->a) + ")";
    }
    case BType::Kind::Exclude: {
      std::string s;
      for (auto& n : t->names) s += (s.empty() ? "" : ",") + n;
      return "(" + print_btype(t->a) + ")^{" + s + "}";
    }
    case BType::Kind::Project: {
      std::string s;
      for (auto& n : t->names) s += (s.empty() ? "" : ",") + n;
      return "(" + print_btype(t->a) + ")@{" + s + "}";
    }
    case BType::Kind::Rec:
      return "(mu " + t->name + ". " + print_btype(t->a) + ")";
  }
  return "?";
}

bool btype_eq(const BPtr& a, const BPtr& b) {
  return a == b || print_btype(a) == print_btype(b);
}

std::set<Name> btype_free_names(const BPtr& t) {
  // Types share subtrees heavily, and the constructors consult free names on
  // every build, so the set is cached on the node itself: computed at most
  // once per node for the node's whole lifetime (a restriction subtracts its
  // binder at the node, making the set context-independent).
  std::function<const std::set<Name>&(const BPtr&)> go =
      [&](const BPtr& u) -> const std::set<Name>& {
    static const std::set<Name> none;
    if (!u) return none;
    if (u->free_cache) return *u->free_cache;
    std::set<Name> out;
    switch (u->kind) {
      case BType::Kind::Zero:
      case BType::Kind::Var:
        break;
      case BType::Kind::Act:
        out = go(u->a);
        if (u->act.kind != TAction::Kind::Tau) out.insert(u->act.name);
        break;
      case BType::Kind::Par:
      case BType::Kind::Choice: {
        out = go(u->a);
        const std::set<Name>& r = go(u->b);
        out.insert(r.begin(), r.end());
        break;
      }
      case BType::Kind::Repl:
      case BType::Kind::Rec:
        out = go(u->a);
        break;
      case BType::Kind::Hide:
        out = go(u->a);
        out.erase(u->name);
        break;
      case BType::Kind::Rename:
        out = go(u->a);
        for (auto& pr : u->pairs) {
          out.insert(pr.first);
          out.insert(pr.second);
        }
        break;
      case BType::Kind::Exclude:
      case BType::Kind::Project:
        out = go(u->a);
        for (auto& n : u->names) out.insert(n);
        break;
    }
    u->free_cache = std::make_shared<const std::set<Name>>(std::move(out));
    return *u->free_cache;
  };
  return go(t);
}

std::set<Name> btype_free_vars(const BPtr& t) {
  // Cached on the node like btype_free_names (a mu-binder subtracts its
  // variable at the node, making the set context-independent).
  std::function<const std::set<Name>&(const BPtr&)> go =
      [&](const BPtr& u) -> const std::set<Name>& {
    static const std::set<Name> none;
    if (!u) return none;
    if (u->fvar_cache) return *u->fvar_cache;
    std::set<Name> out;
    switch (u->kind) {
      case BType::Kind::Var:
        out.insert(u->name);
        break;
      case BType::Kind::Rec:
        out = go(u->a);
        out.erase(u->name);
        break;
      default: {
        out = go(u->a);
        const std::set<Name>& r = go(u->b);
        out.insert(r.begin(), r.end());
        break;
      }
    }
    u->fvar_cache = std::make_shared<const std::set<Name>>(std::move(out));
    return *u->fvar_cache;
  };
  return go(t);
}

BPtr b_subst_var(const BPtr& t, const Name& var, const BPtr& replacement) {
  // Memoised per node so shared subtrees are rewritten once and stay shared.
  std::map<const BType*, BPtr> memo;
  std::function<BPtr(const BPtr&)> go = [&](const BPtr& u) -> BPtr {
    auto hit = memo.find(u.get());
    if (hit != memo.end()) return hit->second;
    BPtr out;
    switch (u->kind) {
      case BType::Kind::Zero:
        out = u;
        break;
      case BType::Kind::Var:
        out = u->name == var ? replacement : u;
        break;
      case BType::Kind::Act:
        out = b_act(u->act, u->attr, go(u->a));
        break;
      case BType::Kind::Par:
        out = b_par(go(u->a), go(u->b));
        break;
      case BType::Kind::Choice:
        out = b_choice(go(u->a), go(u->b));
        break;
      case BType::Kind::Repl:
        out = b_repl(go(u->a));
        break;
      case BType::Kind::Hide:
        out = b_hide(u->name, go(u->a));
        break;
      case BType::Kind::Rename:
        out = b_rename(u->pairs, go(u->a));
        break;
      case BType::Kind::Exclude:
        out = b_exclude(go(u->a), u->names);
        break;
      case BType::Kind::Project:
        out = b_project(go(u->a), u->names);
        break;
      case BType::Kind::Rec:
        out = u->name == var ? u : b_rec(u->name, go(u->a));    // shadowing
        break;
    }
    memo.emplace(u.get(), out);
    return out;
  };
  return go(t);
}

static std::atomic<long> g_fresh_counter{0};

Name fresh_name(const Name& base) {
  return base + "$r" + std::to_string(++g_fresh_counter);
}

void reset_fresh_names(long next) { g_fresh_counter = next; }

BPtr b_apply_rename(const BPtr& t,
                    const std::vector<std::pair<Name, Name>>& pairs) {
  if (pairs.empty()) return t;
  using Pairs = std::vector<std::pair<Name, Name>>;
  // The pair list changes when crossing a restriction, so the memo is keyed
  // by node and serialised pairs; sharing in the input stays shared.
  auto key_of = [](const Pairs& ps) {
    std::string k;
    for (auto& pr : ps) {
      k += pr.first;
      k += '\x01';
      k += pr.second;
      k += '\x01';
    }
    return k;
  };
  std::map<std::pair<const BType*, std::string>, BPtr> memo;
  std::function<BPtr(const BPtr&, const Pairs&, const std::string&)> go =
      [&](const BPtr& u, const Pairs& ps, const std::string& pk) -> BPtr {
    if (ps.empty()) return u;
    std::pair<const BType*, std::string> mk{u.get(), pk};
    auto hit = memo.find(mk);
    if (hit != memo.end()) return hit->second;
    auto ren = [&](const Name& n) -> Name {
      for (auto& pr : ps)
        if (pr.first == n) return pr.second;
      return n;
    };
    BPtr out;
    switch (u->kind) {
      case BType::Kind::Zero:
      case BType::Kind::Var:
        out = u;
        break;
      case BType::Kind::Act: {
        TAction a = u->act;
        if (a.kind != TAction::Kind::Tau) a.name = ren(a.name);
        out = b_act(a, u->attr, go(u->a, ps, pk));
        break;
      }
      case BType::Kind::Par:
        out = b_par(go(u->a, ps, pk), go(u->b, ps, pk));
        break;
      case BType::Kind::Choice:
        out = b_choice(go(u->a, ps, pk), go(u->b, ps, pk));
        break;
      case BType::Kind::Repl:
        out = b_repl(go(u->a, ps, pk));
        break;
      case BType::Kind::Hide: {
        // Drop pairs renaming the bound name; alpha-rename it if captured.
        Pairs kept;
        bool capture = false;
        for (auto& pr : ps) {
          if (pr.first == u->name) continue;
          if (pr.second == u->name) capture = true;
          kept.push_back(pr);
        }
        BPtr body = u->a;
        Name bound = u->name;
        if (capture) {
          Name nb = fresh_name(bound);
          Pairs alpha{{bound, nb}};
          body = go(body, alpha, key_of(alpha));
          bound = nb;
        }
        out = b_hide(bound, go(body, kept, key_of(kept)));
        break;
      }
      case BType::Kind::Rename: {
        // Compose: inner pairs applied first, then ours.
        Pairs composed;
        std::set<Name> inner_sources;
        for (auto& pr : u->pairs) {
          composed.emplace_back(pr.first, ren(pr.second));
          inner_sources.insert(pr.first);
        }
        for (auto& pr : ps)
          if (!inner_sources.count(pr.first)) composed.push_back(pr);
        out = b_rename(std::move(composed), u->a);
        break;
      }
      case BType::Kind::Exclude: {
        std::set<Name> names;
        for (auto& n : u->names) names.insert(ren(n));
        out = b_exclude(go(u->a, ps, pk), std::move(names));
        break;
      }
      case BType::Kind::Project: {
        std::set<Name> names;
        for (auto& n : u->names) names.insert(ren(n));
        out = b_project(go(u->a, ps, pk), std::move(names));
        break;
      }
      case BType::Kind::Rec:
        out = b_rec(u->name, go(u->a, ps, pk));
        break;
    }
    memo.emplace(std::move(mk), out);
    return out;
  };
  return go(t, pairs, key_of(pairs));
}

// ---------------------------------------------------------------------------
// Transitions.
// ---------------------------------------------------------------------------

namespace {

using Steps = std::vector<std::pair<TLabel, BPtr>>;

void tstep_impl(const BPtr& t, std::set<std::string>& visiting, Steps& out);

// Apply a renaming to a label.
TLabel rename_label(const TLabel& l,
                    const std::vector<std::pair<Name, Name>>& pairs) {
  auto ren = [&](const Name& n) -> Name {
    for (auto& pr : pairs)
      if (pr.first == n) return pr.second;
    return n;
  };
  TLabel r = l;
  switch (l.kind) {
    case TLabel::Kind::Tau:
      break;
    case TLabel::Kind::Pair:
      r.name = ren(l.name);
      r.other = ren(l.other);
      break;
    default:
      r.name = ren(l.name);
      break;
  }
  return r;
}

void tstep_impl(const BPtr& t, std::set<std::string>& visiting, Steps& out) {
  switch (t->kind) {
    case BType::Kind::Zero:
    case BType::Kind::Var:
      return;
    case BType::Kind::Act: {
      TLabel l;
      switch (t->act.kind) {
        case TAction::Kind::Out:
          l = tl_out(t->act.name);
          break;
        case TAction::Kind::In:
          l = tl_in(t->act.name);
          break;
        case TAction::Kind::Acc:
          l = tl_acc(t->act.name, t->act.acc);
          break;
        case TAction::Kind::Tau:
          l = tl_tau();
          break;
      }
      out.emplace_back(l, t->a);
      return;
    }
    case BType::Kind::Choice:
      out.emplace_back(tl_tau(), t->a);
      out.emplace_back(tl_tau(), t->b);
      return;
    case BType::Kind::Par: {
      Steps ls, rs;
      tstep_impl(t->a, visiting, ls);
      tstep_impl(t->b, visiting, rs);
      for (auto& [l, a2] : ls) out.emplace_back(l, b_par(a2, t->b));
      for (auto& [l, b2] : rs) out.emplace_back(l, b_par(t->a, b2));
      for (auto& [la, a2] : ls)
        for (auto& [lb, b2] : rs) {
          Name in_side, out_side;
          if (la.kind == TLabel::Kind::In && lb.kind == TLabel::Kind::Out) {
            in_side = la.name;
            out_side = lb.name;
          } else if (la.kind == TLabel::Kind::Out &&
                     lb.kind == TLabel::Kind::In) {
            in_side = lb.name;
            out_side = la.name;
          } else {
            continue;
          }
          BPtr target = b_par(a2, b2);
          out.emplace_back(tl_pair(in_side, out_side), target);
          if (in_side == out_side) out.emplace_back(tl_tau(), target);
        }
      return;
    }
    case BType::Kind::Repl: {
      Steps body;
      tstep_impl(t->a, visiting, body);
      for (auto& [l, a2] : body) out.emplace_back(l, b_par(a2, t));
      // Two unfolded copies may synchronise with each other.
      for (auto& [l1, c1] : body)
        for (auto& [l2, c2] : body) {
          if (l1.kind != TLabel::Kind::In || l2.kind != TLabel::Kind::Out)
            continue;
          BPtr target = b_par(c1, b_par(c2, t));
          out.emplace_back(tl_pair(l1.name, l2.name), target);
          if (l1.name == l2.name) out.emplace_back(tl_tau(), target);
        }
      return;
    }
    case BType::Kind::Rec: {
      std::string key = print_btype(t);
      if (visiting.count(key)) return;    // divergence: no steps
      visiting.insert(key);
      BPtr unfolded = b_subst_var(t->a, t->name, t);
      tstep_impl(unfolded, visiting, out);
      visiting.erase(key);
      return;
    }
    case BType::Kind::Hide: {
      Steps body;
      tstep_impl(t->a, visiting, body);
      for (auto& [l, a2] : body) {
        if (tlabel_targets(l).count(t->name)) continue;    // restricted
        out.emplace_back(l, b_hide(t->name, a2));
      }
      return;
    }
    case BType::Kind::Rename: {
      Steps body;
      tstep_impl(t->a, visiting, body);
      for (auto& [l, a2] : body) {
        TLabel l2 = rename_label(l, t->pairs);
        BPtr target = b_rename(t->pairs, a2);
        out.emplace_back(l2, target);
        if (l2.kind == TLabel::Kind::Pair && l2.name == l2.other)
          out.emplace_back(tl_tau(), target);
      }
      return;
    }
    case BType::Kind::Exclude: {
      Steps body;
      tstep_impl(t->a, visiting, body);
      for (auto& [l, a2] : body) {
        BPtr target = b_exclude(a2, t->names);
        if (l.kind == TLabel::Kind::Tau) {
          out.emplace_back(l, target);
          continue;
        }
        std::set<Name> tg = tlabel_targets(l);
        size_t inside = 0;
        for (auto& n : tg) inside += t->names.count(n);
        if (inside == tg.size()) {
          out.emplace_back(tl_tau(), target);
        } else if (inside == 0) {
          out.emplace_back(l, target);
        }
        // mixed pair: blocked
      }
      return;
    }
    case BType::Kind::Project: {
      Steps body;
      tstep_impl(t->a, visiting, body);
      for (auto& [l, a2] : body) {
        BPtr target = b_project(a2, t->names);
        if (l.kind == TLabel::Kind::Tau) {
          out.emplace_back(l, target);
          continue;
        }
        std::set<Name> tg = tlabel_targets(l);
        size_t inside = 0;
        for (auto& n : tg) inside += t->names.count(n);
        if (inside == tg.size()) {
          out.emplace_back(l, target);
        } else if (inside == 0) {
          out.emplace_back(tl_tau(), target);
        }
        // mixed pair: blocked
      }
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<TLabel, BPtr>> tstep(const BPtr& t) {
  Steps raw;
  std::set<std::string> visiting;
  tstep_impl(t, visiting, raw);
  // Deduplicate and order deterministically.
  std::vector<std::pair<std::pair<std::string, std::string>, size_t>> keys;
  keys.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i)
    keys.push_back({{print_tlabel(raw[i].first), print_btype(raw[i].second)}, i});
  std::sort(keys.begin(), keys.end());
  Steps out;
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i && keys[i].first == keys[i - 1].first) continue;
    out.push_back(raw[keys[i].second]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Disabledness.
// ---------------------------------------------------------------------------

namespace {
bool disabled_impl(const BPtr& t, const std::set<Name>& S,
                   std::set<std::string>& visiting) {
  switch (t->kind) {
    case BType::Kind::Zero:
      return true;
    case BType::Kind::Var:
      return false;    // least relation: underivable
    case BType::Kind::Act:
      if (t->act.kind == TAction::Kind::Acc)
        return !S.count(t->act.name) && disabled_impl(t->a, S, visiting);
      // A syntactic tau is internal and always fires, like an action that is
      // guaranteed to succeed; both stop only where their continuation stops.
      if (t->act.kind == TAction::Kind::Tau || t->attr == Attr::Succeeds)
        return disabled_impl(t->a, S, visiting);
      return true;    // an unannotated send/receive may never fire
    case BType::Kind::Par:
      return disabled_impl(t->a, S, visiting) &&
             disabled_impl(t->b, S, visiting);
    case BType::Kind::Choice:
      return disabled_impl(t->a, S, visiting) ||
             disabled_impl(t->b, S, visiting);
    case BType::Kind::Repl:
      return disabled_impl(t->a, S, visiting);
    case BType::Kind::Hide: {
      std::set<Name> S2 = S;
      S2.erase(t->name);
      return disabled_impl(t->a, S2, visiting);
    }
    case BType::Kind::Rename: {
      std::set<Name> S2;
      std::set<Name> sources;
      for (auto& pr : t->pairs) {
        sources.insert(pr.first);
        if (S.count(pr.second)) S2.insert(pr.first);
      }
      for (auto& n : S)
        if (!sources.count(n)) S2.insert(n);
      return disabled_impl(t->a, S2, visiting);
    }
    case BType::Kind::Exclude: {
      std::set<Name> S2;
      for (auto& n : S)
        if (!t->names.count(n)) S2.insert(n);
      return disabled_impl(t->a, S2, visiting);
    }
    case BType::Kind::Project: {
      std::set<Name> S2;
      for (auto& n : S)
        if (t->names.count(n)) S2.insert(n);
      return disabled_impl(t->a, S2, visiting);
    }
    case BType::Kind::Rec: {
      std::string key = print_btype(t);
      for (auto& n : S) key += "\x01" + n;
      if (visiting.count(key)) return false;    // least fixpoint
      visiting.insert(key);
      bool r = disabled_impl(b_subst_var(t->a, t->name, t), S, visiting);
      visiting.erase(key);
      return r;
    }
  }
  return false;
}
}  // namespace

bool disabled(const BPtr& t, const std::set<Name>& S) {
  std::set<std::string> visiting;
  return disabled_impl(t, S, visiting);
}

// ---------------------------------------------------------------------------
// Bounded access traces.
// ---------------------------------------------------------------------------

namespace {

// Set of states keyed by print, preserving a representative pointer.
using StateSet = std::map<std::string, BPtr>;

// tau-closure with a size cap; sets `partial` when the cap is hit.
// Breadth-first, so a capped closure still reaches every shallow state even
// when one branch spawns new components forever.
StateSet tau_closure(const StateSet& start, int cap, bool& partial) {
  StateSet seen = start;
  std::deque<BPtr> work;
  for (auto& [k, v] : start) work.push_back(v);
  while (!work.empty()) {
    if ((int)seen.size() > cap) {
      partial = true;
      return seen;
    }
    BPtr s = work.front();
    work.pop_front();
    for (auto& [l, s2] : tstep(s)) {
      if (l.kind != TLabel::Kind::Tau) continue;
      std::string key = print_btype(s2);
      if (seen.emplace(key, s2).second) work.push_back(s2);
    }
  }
  return seen;
}

}  // namespace

TraceSet traces_bounded(const BPtr& t, const Name& x, int k, bool extended,
                        int cap) {
  TraceSet result;
  BPtr a0 = b_project(t, {x});
  std::set<Name> Sx{x};

  auto any_disabled = [&](const StateSet& ss) {
    for (auto& [key, s] : ss)
      if (disabled(s, Sx)) return true;
    return false;
  };

  std::map<std::vector<std::string>, StateSet> layer;
  StateSet init;
  init.emplace(print_btype(a0), a0);
  layer[{}] = tau_closure(init, cap, result.partial);

  result.words.emplace();
  if (extended && any_disabled(layer[{}])) result.words.insert({kDown});

  for (int len = 0; len < k; ++len) {
    std::map<std::vector<std::string>, StateSet> next;
    for (auto& [word, states] : layer) {
      if ((int)word.size() != len) continue;
      std::map<std::string, StateSet> buckets;
      for (auto& [key, s] : states)
        for (auto& [l, s2] : tstep(s)) {
          if (l.kind != TLabel::Kind::Acc) continue;
          if (l.name != x) continue;
          buckets[l.acc].emplace(print_btype(s2), s2);
        }
      for (auto& [sym, bucket] : buckets) {
        StateSet closed = tau_closure(bucket, cap, result.partial);
        std::vector<std::string> w2 = word;
        w2.push_back(sym);
        result.words.insert(w2);
        if (extended && any_disabled(closed)) {
          std::vector<std::string> w3 = w2;
          w3.push_back(kDown);
          result.words.insert(w3);
        }
        next.emplace(std::move(w2), std::move(closed));
      }
    }
    if (next.empty()) break;
    layer = std::move(next);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Weak simulation.
// ---------------------------------------------------------------------------

namespace {

struct Lts {
  std::vector<BPtr> states;
  std::map<std::string, int> index;
  // transitions[i] = list of (label id, successor)
  std::vector<std::vector<std::pair<int, int>>> trans;
  std::vector<std::vector<int>> tau_reach;    // states reachable by tau*
};

// Explores the LTS of t; returns false if the state bound is exceeded.
bool build_lts(const BPtr& t, int bound, std::map<std::string, int>& label_ids,
               Lts& out) {
  auto intern_label = [&](const TLabel& l) {
    std::string key = print_tlabel(l);
    auto it = label_ids.find(key);
    if (it != label_ids.end()) return it->second;
    int id = (int)label_ids.size();
    label_ids.emplace(key, id);
    return id;
  };
  auto intern_state = [&](const BPtr& s) {
    std::string key = print_btype(s);
    auto it = out.index.find(key);
    if (it != out.index.end()) return std::pair<int, bool>{it->second, false};
    int id = (int)out.states.size();
    out.index.emplace(key, id);
    out.states.push_back(s);
    out.trans.emplace_back();
    return std::pair<int, bool>{id, true};
  };
  intern_state(t);
  for (size_t i = 0; i < out.states.size(); ++i) {
    if ((int)out.states.size() > bound) return false;
    for (auto& [l, s2] : tstep(out.states[i])) {
      auto [j, fresh] = intern_state(s2);
      out.trans[i].push_back({intern_label(l), j});
      (void)fresh;
    }
    if ((int)out.states.size() > bound) return false;
  }
  // tau* closure per state.
  int tau_id = -1;
  auto it = label_ids.find("tau");
  if (it != label_ids.end()) tau_id = it->second;
  out.tau_reach.resize(out.states.size());
  for (size_t i = 0; i < out.states.size(); ++i) {
    std::vector<int> seen{(int)i};
    std::set<int> seen_set{(int)i};
    for (size_t w = 0; w < seen.size(); ++w)
      for (auto& [lab, j] : out.trans[seen[w]])
        if (lab == tau_id && seen_set.insert(j).second) seen.push_back(j);
    out.tau_reach[i] = std::move(seen);
  }
  return true;
}

}  // namespace

SimResult simulates(const BPtr& t1, const BPtr& t2, bool extended,
                    int state_bound) {
  SimResult res;
  std::map<std::string, int> label_ids;
  label_ids.emplace("tau", 0);
  Lts m1, m2;
  if (!build_lts(t1, state_bound, label_ids, m1) ||
      !build_lts(t2, state_bound, label_ids, m2)) {
    res.not_finite_state = true;
    return res;
  }
  size_t n1 = m1.states.size(), n2 = m2.states.size();

  // Disabledness over subsets of the free names involved (extended mode).
  std::vector<std::set<Name>> subsets;
  std::vector<std::vector<bool>> dis1, dis2;
  if (extended) {
    std::set<Name> fns = btype_free_names(t1);
    for (auto& n : btype_free_names(t2)) fns.insert(n);
    std::vector<Name> base(fns.begin(), fns.end());
    if (base.size() > 12) base.resize(12);    // keep the lattice tractable
    for (size_t mask = 0; mask < (size_t(1) << base.size()); ++mask) {
      std::set<Name> s;
      for (size_t b = 0; b < base.size(); ++b)
        if (mask & (size_t(1) << b)) s.insert(base[b]);
      subsets.push_back(std::move(s));
    }
    auto compute = [&](const Lts& m, std::vector<std::vector<bool>>& out) {
      out.assign(m.states.size(), std::vector<bool>(subsets.size()));
      for (size_t i = 0; i < m.states.size(); ++i)
        for (size_t s = 0; s < subsets.size(); ++s)
          out[i][s] = disabled(m.states[i], subsets[s]);
    };
    compute(m1, dis1);
    compute(m2, dis2);
  }

  std::vector<std::vector<bool>> R(n1, std::vector<bool>(n2, true));
  if (extended) {
    for (size_t i = 0; i < n1; ++i)
      for (size_t j = 0; j < n2; ++j)
        for (size_t s = 0; s < subsets.size() && R[i][j]; ++s)
          if (dis1[i][s] && !dis2[j][s]) R[i][j] = false;
  }

  // Weak successors of m2 by a visible label: tau* l tau*.
  std::map<std::pair<int, int>, std::vector<int>> weak_cache;
  auto weak_succ = [&](int j, int lab) -> const std::vector<int>& {
    auto key = std::make_pair(j, lab);
    auto it = weak_cache.find(key);
    if (it != weak_cache.end()) return it->second;
    std::set<int> acc;
    for (int j1 : m2.tau_reach[j])
      for (auto& [l, j2] : m2.trans[j1])
        if (l == lab)
          for (int j3 : m2.tau_reach[j2]) acc.insert(j3);
    return weak_cache.emplace(key, std::vector<int>(acc.begin(), acc.end()))
        .first->second;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n1; ++i)
      for (size_t j = 0; j < n2; ++j) {
        if (!R[i][j]) continue;
        bool ok = true;
        for (auto& [lab, i2] : m1.trans[i]) {
          bool matched = false;
          if (lab == 0) {
            for (int j2 : m2.tau_reach[j])
              if (R[i2][j2]) {
                matched = true;
                break;
              }
          } else {
            for (int j2 : weak_succ((int)j, lab))
              if (R[i2][j2]) {
                matched = true;
                break;
              }
          }
          if (!matched) {
            ok = false;
            break;
          }
        }
        if (!ok) {
          R[i][j] = false;
          changed = true;
        }
      }
  }
  res.holds = R[0][0];
  return res;
}

}  // namespace rua
