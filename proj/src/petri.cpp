// petri.cpp - net construction from a basis, firing semantics, bounded net
// traces, and the marking-level disabled predicate.
#include "rua/petri.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace rua {
namespace {

std::string marking_key(const Marking& m) {
  std::string k;
  for (int c : m) {
    k += std::to_string(c);
    k += ',';
  }
  return k;
}

Marking unit(int n, int j, int count = 1) {
  Marking v(n, 0);
  v[j] = count;
  return v;
}

Marking counts_of(int n, const std::vector<int>& ids) {
  Marking v(n, 0);
  for (int id : ids) v[id]++;
  return v;
}

Marking plus(const Marking& a, const Marking& b) {
  Marking v = a;
  for (size_t i = 0; i < v.size(); ++i) v[i] += b[i];
  return v;
}

}  // namespace

Net build_net(const Basis& basis, const Name& x) {
  Net net;
  net.places = basis.atoms;
  net.res = x;
  net.hidden = basis.hidden;
  net.atom_bound = basis.atom_bound;
  const int n = static_cast<int>(basis.atoms.size());
  net.initial = counts_of(n, basis.initial);
  for (int id : basis.initial)
    if (std::find(net.initial_order.begin(), net.initial_order.end(), id) ==
        net.initial_order.end())
      net.initial_order.push_back(id);

  std::set<Name> hidden(basis.hidden.begin(), basis.hidden.end());
  std::set<std::string> seen;
  auto add = [&](const TLabel& lbl, Marking consume, Marking produce) {
    std::string key =
        print_tlabel(lbl) + ';' + marking_key(consume) + ';' + marking_key(produce);
    if (seen.insert(key).second)
      net.transitions.push_back({lbl, std::move(consume), std::move(produce)});
  };

  // Steps one token can take on its own.
  for (int j = 0; j < n && j < static_cast<int>(basis.succs.size()); ++j) {
    for (auto& s : basis.succs[j]) {
      switch (s.label.kind) {
        case TLabel::Kind::Tau:
          add(tl_tau(), unit(n, j), counts_of(n, s.produce));
          break;
        case TLabel::Kind::Acc:
          add(s.label, unit(n, j), counts_of(n, s.produce));
          break;
        default:
          break;   // lone channel halves are handled below or not at all
      }
    }
  }

  // Synchronisation of complementary halves on a hidden channel.  The same
  // place may supply both halves, which then needs two of its tokens.
  for (int j = 0; j < static_cast<int>(basis.succs.size()); ++j) {
    for (auto& sin : basis.succs[j]) {
      if (sin.label.kind != TLabel::Kind::In || !hidden.count(sin.label.name))
        continue;
      for (int j2 = 0; j2 < static_cast<int>(basis.succs.size()); ++j2) {
        for (auto& sout : basis.succs[j2]) {
          if (sout.label.kind != TLabel::Kind::Out ||
              sout.label.name != sin.label.name)
            continue;
          Marking consume = plus(unit(n, j), unit(n, j2));
          Marking produce =
              plus(counts_of(n, sin.produce), counts_of(n, sout.produce));
          add(tl_tau(), std::move(consume), std::move(produce));
        }
      }
    }
  }
  return net;
}

std::vector<std::pair<TLabel, Marking>> net_step(const Net& net,
                                                 const Marking& m) {
  std::vector<std::pair<TLabel, Marking>> out;
  for (auto& t : net.transitions) {
    bool ok = true;
    for (size_t i = 0; i < m.size(); ++i)
      if (m[i] < t.consume[i]) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Marking m2 = m;
    for (size_t i = 0; i < m.size(); ++i) m2[i] += t.produce[i] - t.consume[i];
    out.emplace_back(t.label, std::move(m2));
  }
  return out;
}

namespace {

using MSet = std::map<std::string, Marking>;

// Closure under internal moves: tau transitions and accesses to resources
// other than the net's own.  Breadth-first so a capped closure still reaches
// every shallow marking even when one branch grows the marking forever.
MSet closure(const Net& net, MSet start, int cap, bool& partial) {
  MSet out = start;
  std::deque<Marking> work;
  for (auto& [k, m] : start) work.push_back(m);
  while (!work.empty()) {
    if (static_cast<int>(out.size()) > cap) {
      partial = true;
      break;
    }
    Marking m = work.front();
    work.pop_front();
    for (auto& [lbl, m2] : net_step(net, m)) {
      bool internal =
          tlabel_is_tau(lbl) ||
          (lbl.kind == TLabel::Kind::Acc && lbl.name != net.res);
      if (!internal) continue;
      std::string k = marking_key(m2);
      if (out.emplace(k, m2).second) work.push_back(m2);
    }
  }
  return out;
}

}  // namespace

TraceSet ptraces_bounded(const Net& net, int k, bool extended, int cap) {
  TraceSet result;
  std::set<Name> Sx{net.res};

  auto any_disabled = [&](const MSet& ms) {
    for (auto& [key, m] : ms)
      if (pdisabled(net, m, Sx)) return true;
    return false;
  };

  MSet init;
  init.emplace(marking_key(net.initial), net.initial);
  std::map<std::vector<std::string>, MSet> layer;
  layer[{}] = closure(net, std::move(init), cap, result.partial);

  result.words.emplace();
  if (extended && any_disabled(layer[{}])) result.words.insert({kDown});

  for (int len = 0; len < k; ++len) {
    std::map<std::vector<std::string>, MSet> next;
    for (auto& [word, markings] : layer) {
      if (static_cast<int>(word.size()) != len) continue;
      std::map<std::string, MSet> buckets;
      for (auto& [key, m] : markings)
        for (auto& [lbl, m2] : net_step(net, m)) {
          if (lbl.kind != TLabel::Kind::Acc || lbl.name != net.res) continue;
          buckets[lbl.acc].emplace(marking_key(m2), m2);
        }
      for (auto& [sym, bucket] : buckets) {
        MSet closed = closure(net, std::move(bucket), cap, result.partial);
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

bool pdisabled(const Net& net, const Marking& m, const std::set<Name>& s) {
  std::set<Name> s2 = s;
  for (auto& h : net.hidden) s2.erase(h);
  for (size_t j = 0; j < m.size(); ++j)
    if (m[j] > 0 && !disabled(net.places[j], s2)) return false;
  return true;
}

std::string net_dump_text(const Net& net) {
  std::ostringstream os;
  os << "(*** initial marking ***)\n";
  bool first = true;
  for (int id : net.initial_order) {
    if (!first) os << " | ";
    first = false;
    os << net.initial[id] << " * " << id;
  }
  if (net.initial_order.empty()) os << "(empty)";
  os << "\n";
  os << "(*** " << net.places.size() << " Places ***)\n";
  for (size_t j = 0; j < net.places.size(); ++j)
    os << j << ": " << print_btype(net.places[j]) << "\n";
  os << "(*** " << net.transitions.size() << " Transitions ***)\n";
  for (auto& t : net.transitions) {
    os << print_tlabel(t.label) << ": ";
    bool f = true;
    for (size_t j = 0; j < t.consume.size(); ++j)
      if (t.consume[j] > 0) {
        if (!f) os << " | ";
        f = false;
        os << t.consume[j] << "*" << j;
      }
    os << " -> ";
    f = true;
    for (size_t j = 0; j < t.consume.size(); ++j)
      if (t.consume[j] > 0) {
        if (!f) os << " | ";
        f = false;
        os << "-" << t.consume[j] << "*" << j;
      }
    for (size_t j = 0; j < t.produce.size(); ++j)
      if (t.produce[j] > 0) {
        if (!f) os << " | ";
        f = false;
        os << t.produce[j] << "*" << j;
      }
    os << "\n";
  }
  return os.str();
}

std::string net_dump_dot(const Net& net) {
  std::ostringstream os;
  os << "digraph net {\n  rankdir=LR;\n";
  for (size_t j = 0; j < net.places.size(); ++j) {
    os << "  p" << j << " [shape=box,label=\"" << j << ": ";
    for (char c : print_btype(net.places[j])) {
      if (c == '"' || c == '\\') os << '\\';
      os << c;
    }
    os << (net.initial[j] > 0 ? "\\n(" + std::to_string(net.initial[j]) + " token)" : "")
       << "\"];\n";
  }
  for (size_t i = 0; i < net.transitions.size(); ++i) {
    auto& t = net.transitions[i];
    os << "  t" << i << " [shape=point,xlabel=\"" << print_tlabel(t.label)
       << "\"];\n";
    for (size_t j = 0; j < t.consume.size(); ++j)
      if (t.consume[j] > 0) {
        os << "  p" << j << " -> t" << i;
        if (t.consume[j] > 1) os << " [label=\"" << t.consume[j] << "\"]";
        os << ";\n";
      }
    for (size_t j = 0; j < t.produce.size(); ++j)
      if (t.produce[j] > 0) {
        os << "  t" << i << " -> p" << j;
        if (t.produce[j] > 1) os << " [label=\"" << t.produce[j] << "\"]";
        os << ";\n";
      }
  }
  os << "}\n";
  return os.str();
}

}  // namespace rua
