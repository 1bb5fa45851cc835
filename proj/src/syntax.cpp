// syntax.cpp - spec regexes, process constructors, parser, printers
#include "rua/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace rua {

// ---------------------------------------------------------------------------
// Trace-spec construction.  The smart constructors keep regexes in a small
// canonical form (no Empty/Epsilon litter, unions flattened/sorted/deduped)
// so that syntactic equality is usable as a state key for derivative
// automata, and emptiness is simply kind == Empty.
// ---------------------------------------------------------------------------

namespace {

SpecPtr mk(TraceSpec::Kind k, std::string sym = "", SpecPtr l = nullptr,
           SpecPtr r = nullptr) {
  auto s = std::make_shared<TraceSpec>();
  s->kind = k;
  s->sym = std::move(sym);
  s->left = std::move(l);
  s->right = std::move(r);
  return s;
}

int spec_cmp(const SpecPtr& a, const SpecPtr& b) {
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case TraceSpec::Kind::Empty:
    case TraceSpec::Kind::Epsilon:
    case TraceSpec::Kind::Down:
      return 0;
    case TraceSpec::Kind::Symbol:
      return a->sym.compare(b->sym);
    case TraceSpec::Kind::Star:
      return spec_cmp(a->left, b->left);
    case TraceSpec::Kind::Concat:
    case TraceSpec::Kind::Union: {
      int c = spec_cmp(a->left, b->left);
      return c != 0 ? c : spec_cmp(a->right, b->right);
    }
  }
  return 0;
}

bool spec_eq(const SpecPtr& a, const SpecPtr& b) { return spec_cmp(a, b) == 0; }

void union_parts(const SpecPtr& s, std::vector<SpecPtr>& out) {
  if (s->kind == TraceSpec::Kind::Union) {
    union_parts(s->left, out);
    union_parts(s->right, out);
  } else if (s->kind != TraceSpec::Kind::Empty) {
    out.push_back(s);
  }
}

}  // namespace

SpecPtr spec_empty() {
  static SpecPtr s = mk(TraceSpec::Kind::Empty);
  return s;
}
SpecPtr spec_epsilon() {
  static SpecPtr s = mk(TraceSpec::Kind::Epsilon);
  return s;
}
SpecPtr spec_down() {
  static SpecPtr s = mk(TraceSpec::Kind::Down);
  return s;
}
SpecPtr spec_symbol(const std::string& sym) {
  return mk(TraceSpec::Kind::Symbol, sym);
}

SpecPtr spec_concat(SpecPtr a, SpecPtr b) {
  if (a->kind == TraceSpec::Kind::Empty || b->kind == TraceSpec::Kind::Empty)
    return spec_empty();
  if (a->kind == TraceSpec::Kind::Epsilon) return b;
  if (b->kind == TraceSpec::Kind::Epsilon) return a;
  // Right-associate so equal languages built in different orders agree.
  if (a->kind == TraceSpec::Kind::Concat)
    return spec_concat(a->left, spec_concat(a->right, b));
  return mk(TraceSpec::Kind::Concat, "", std::move(a), std::move(b));
}

SpecPtr spec_union(SpecPtr a, SpecPtr b) {
  std::vector<SpecPtr> parts;
  union_parts(a, parts);
  union_parts(b, parts);
  if (parts.empty()) return spec_empty();
  std::sort(parts.begin(), parts.end(),
            [](const SpecPtr& x, const SpecPtr& y) { return spec_cmp(x, y) < 0; });
  parts.erase(std::unique(parts.begin(), parts.end(),
                          [](const SpecPtr& x, const SpecPtr& y) {
                            return spec_eq(x, y);
                          }),
              parts.end());
  SpecPtr acc = parts.back();
  for (size_t i = parts.size() - 1; i-- > 0;)
    acc = mk(TraceSpec::Kind::Union, "", parts[i], acc);
  return acc;
}

SpecPtr spec_star(SpecPtr a) {
  if (a->kind == TraceSpec::Kind::Empty || a->kind == TraceSpec::Kind::Epsilon)
    return spec_epsilon();
  if (a->kind == TraceSpec::Kind::Star) return a;
  return mk(TraceSpec::Kind::Star, "", std::move(a));
}

bool spec_nullable(const SpecPtr& s) {
  switch (s->kind) {
    case TraceSpec::Kind::Empty:
    case TraceSpec::Kind::Symbol:
    case TraceSpec::Kind::Down:
      return false;
    case TraceSpec::Kind::Epsilon:
    case TraceSpec::Kind::Star:
      return true;
    case TraceSpec::Kind::Concat:
      return spec_nullable(s->left) && spec_nullable(s->right);
    case TraceSpec::Kind::Union:
      return spec_nullable(s->left) || spec_nullable(s->right);
  }
  return false;
}

bool spec_is_empty(const SpecPtr& s) {
  // Smart constructors collapse every empty language to the Empty node.
  return s->kind == TraceSpec::Kind::Empty;
}

SpecPtr spec_deriv(const SpecPtr& s, const std::string& sym) {
  switch (s->kind) {
    case TraceSpec::Kind::Empty:
    case TraceSpec::Kind::Epsilon:
      return spec_empty();
    case TraceSpec::Kind::Symbol:
      return s->sym == sym ? spec_epsilon() : spec_empty();
    case TraceSpec::Kind::Down:
      return sym == kDown ? spec_epsilon() : spec_empty();
    case TraceSpec::Kind::Concat: {
      SpecPtr d = spec_concat(spec_deriv(s->left, sym), s->right);
      if (spec_nullable(s->left)) d = spec_union(d, spec_deriv(s->right, sym));
      return d;
    }
    case TraceSpec::Kind::Union:
      return spec_union(spec_deriv(s->left, sym), spec_deriv(s->right, sym));
    case TraceSpec::Kind::Star:
      return spec_concat(spec_deriv(s->left, sym), s);
  }
  return spec_empty();
}

std::set<std::string> spec_symbols(const SpecPtr& s) {
  std::set<std::string> out;
  std::vector<SpecPtr> work{s};
  while (!work.empty()) {
    SpecPtr t = work.back();
    work.pop_back();
    if (t->kind == TraceSpec::Kind::Symbol) out.insert(t->sym);
    if (t->kind == TraceSpec::Kind::Down) out.insert(kDown);
    if (t->left) work.push_back(t->left);
    if (t->right) work.push_back(t->right);
  }
  return out;
}

SpecPtr spec_erase_down(const SpecPtr& s) {
  switch (s->kind) {
    case TraceSpec::Kind::Down:
      return spec_epsilon();
    case TraceSpec::Kind::Concat:
      return spec_concat(spec_erase_down(s->left), spec_erase_down(s->right));
    case TraceSpec::Kind::Union:
      return spec_union(spec_erase_down(s->left), spec_erase_down(s->right));
    case TraceSpec::Kind::Star:
      return spec_star(spec_erase_down(s->left));
    default:
      return s;
  }
}

bool spec_has_down(const SpecPtr& s) {
  if (s->kind == TraceSpec::Kind::Down) return true;
  if (s->left && spec_has_down(s->left)) return true;
  if (s->right && spec_has_down(s->right)) return true;
  return false;
}

std::string spec_print(const SpecPtr& s) {
  // Precedence: union < concat < star.
  std::function<std::string(const SpecPtr&, int)> go =
      [&](const SpecPtr& t, int level) -> std::string {
    switch (t->kind) {
      case TraceSpec::Kind::Empty:
        return "{}";
      case TraceSpec::Kind::Epsilon:
        return "()";
      case TraceSpec::Kind::Symbol:
        return t->sym;
      case TraceSpec::Kind::Down:
        return kDown;
      case TraceSpec::Kind::Star:
        return go(t->left, 2) + "*";
      case TraceSpec::Kind::Concat: {
        std::string r = go(t->left, 1) + " " + go(t->right, 1);
        return level > 1 ? "(" + r + ")" : r;
      }
      case TraceSpec::Kind::Union: {
        std::string r = go(t->left, 0) + "+" + go(t->right, 0);
        return level > 0 ? "(" + r + ")" : r;
      }
    }
    return "?";
  };
  return go(s, 0);
}

// ---------------------------------------------------------------------------
// Process constructors.
// ---------------------------------------------------------------------------

Value v_var(const Name& n) {
  Value v;
  v.kind = Value::Kind::Var;
  v.name = n;
  return v;
}
Value v_bool(bool b) {
  Value v;
  v.kind = b ? Value::Kind::True : Value::Kind::False;
  return v;
}
bool operator==(const Value& a, const Value& b) {
  return a.kind == b.kind && a.name == b.name;
}

namespace {
std::shared_ptr<Process> pmk(Process::Kind k) {
  auto p = std::make_shared<Process>();
  p->kind = k;
  return p;
}
}  // namespace

ProcPtr p_nil() {
  static ProcPtr n = pmk(Process::Kind::Nil);
  return n;
}
ProcPtr p_out(const Name& chan, std::vector<Value> args, Attr t, ProcPtr cont) {
  auto p = pmk(Process::Kind::Output);
  p->chan = chan;
  p->args = std::move(args);
  p->attr = t;
  p->a = std::move(cont);
  return p;
}
ProcPtr p_in(const Name& chan, std::vector<Name> params, Attr t, ProcPtr cont) {
  auto p = pmk(Process::Kind::Input);
  p->chan = chan;
  p->params = std::move(params);
  p->attr = t;
  p->a = std::move(cont);
  return p;
}
ProcPtr p_par(ProcPtr a, ProcPtr b) {
  auto p = pmk(Process::Kind::Par);
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}
ProcPtr p_if(const Value& cond, ProcPtr a, ProcPtr b) {
  auto p = pmk(Process::Kind::If);
  p->cond = cond;
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}
ProcPtr p_nu(const Name& chan, ProcPtr body) {
  auto p = pmk(Process::Kind::Nu);
  p->chan = chan;
  p->a = std::move(body);
  return p;
}
ProcPtr p_repl(ProcPtr body) {
  auto p = pmk(Process::Kind::Repl);
  p->a = std::move(body);
  return p;
}
ProcPtr p_acc(const Name& chan, const std::string& acc, ProcPtr cont) {
  auto p = pmk(Process::Kind::Acc);
  p->chan = chan;
  p->acc = acc;
  p->a = std::move(cont);
  return p;
}
ProcPtr p_nur(const Name& chan, SpecPtr spec, const std::string& spec_name,
              ProcPtr body) {
  auto p = pmk(Process::Kind::NuR);
  p->chan = chan;
  p->spec = std::move(spec);
  p->spec_name = spec_name;
  p->a = std::move(body);
  return p;
}

// ---------------------------------------------------------------------------
// Printing.  The printer produces input the parser accepts again; binder
// forms extend maximally to the right, so they are parenthesised whenever
// something follows them in a parallel composition.
// ---------------------------------------------------------------------------

namespace {

std::string print_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Var:
      return v.name;
    case Value::Kind::True:
      return "true";
    case Value::Kind::False:
      return "false";
  }
  return "?";
}

void par_components(const ProcPtr& p, std::vector<ProcPtr>& out) {
  if (p->kind == Process::Kind::Par) {
    par_components(p->a, out);
    par_components(p->b, out);
  } else {
    out.push_back(p);
  }
}

std::string print_par(const ProcPtr& p);

// Prints one prefix-level term.  `maximal` is true when everything to the
// right belongs to this term, so binder forms may appear without parens.
std::string print_prefix(const ProcPtr& p, bool maximal) {
  switch (p->kind) {
    case Process::Kind::Nil:
      return "0";
    case Process::Kind::Par:
      return "(" + print_par(p) + ")";
    case Process::Kind::Repl:
      return "*(" + print_par(p->a) + ")";
    case Process::Kind::Nu: {
      // Compact consecutive binders: new a, b in P
      std::vector<Name> names;
      ProcPtr body = p;
      while (body->kind == Process::Kind::Nu) {
        names.push_back(body->chan);
        body = body->a;
      }
      std::string s = "new ";
      for (size_t i = 0; i < names.size(); ++i)
        s += (i ? ", " : "") + names[i];
      s += " in " + print_par(body);
      return maximal ? s : "(" + s + ")";
    }
    case Process::Kind::NuR: {
      std::string s = "newR " + p->spec_name + ", " + p->chan + " in " +
                      print_par(p->a);
      return maximal ? s : "(" + s + ")";
    }
    case Process::Kind::If: {
      std::string s = "if " + print_value(p->cond) + " then " +
                      print_par(p->a) + " else " + print_par(p->b);
      return maximal ? s : "(" + s + ")";
    }
    case Process::Kind::Output: {
      std::string s = p->chan + (p->attr == Attr::Succeeds ? "!!(" : "!(");
      for (size_t i = 0; i < p->args.size(); ++i)
        s += (i ? ", " : "") + print_value(p->args[i]);
      s += ")";
      if (p->a->kind != Process::Kind::Nil)
        s += ". " + print_prefix(p->a, maximal);
      return s;
    }
    case Process::Kind::Input: {
      std::string s = p->chan + (p->attr == Attr::Succeeds ? "?" "?(" : "?(");
      for (size_t i = 0; i < p->params.size(); ++i)
        s += (i ? ", " : "") + p->params[i];
      s += ")";
      if (p->a->kind != Process::Kind::Nil)
        s += ". " + print_prefix(p->a, maximal);
      return s;
    }
    case Process::Kind::Acc: {
      std::string s = "acc(" + p->chan + ", " + p->acc + ")";
      if (p->a->kind != Process::Kind::Nil)
        s += ". " + print_prefix(p->a, maximal);
      return s;
    }
  }
  return "?";
}

std::string print_par(const ProcPtr& p) {
  std::vector<ProcPtr> comps;
  par_components(p, comps);
  std::string s;
  for (size_t i = 0; i < comps.size(); ++i) {
    if (i) s += " | ";
    s += print_prefix(comps[i], i + 1 == comps.size());
  }
  return s;
}

}  // namespace

std::string print_process(const ProcPtr& p) { return print_par(p); }

std::set<Name> free_names(const ProcPtr& p) {
  std::set<Name> out;
  std::function<void(const ProcPtr&, std::set<Name>&)> go =
      [&](const ProcPtr& t, std::set<Name>& bound) {
        switch (t->kind) {
          case Process::Kind::Nil:
            return;
          case Process::Kind::Output:
            if (!bound.count(t->chan)) out.insert(t->chan);
            for (auto& v : t->args)
              if (v.kind == Value::Kind::Var && !bound.count(v.name))
                out.insert(v.name);
            go(t->a, bound);
            return;
          case Process::Kind::Input: {
            if (!bound.count(t->chan)) out.insert(t->chan);
            std::set<Name> b2 = bound;
            for (auto& y : t->params) b2.insert(y);
            go(t->a, b2);
            return;
          }
          case Process::Kind::Par:
            go(t->a, bound);
            go(t->b, bound);
            return;
          case Process::Kind::If:
            if (t->cond.kind == Value::Kind::Var && !bound.count(t->cond.name))
              out.insert(t->cond.name);
            go(t->a, bound);
            go(t->b, bound);
            return;
          case Process::Kind::Nu:
          case Process::Kind::NuR: {
            std::set<Name> b2 = bound;
            b2.insert(t->chan);
            go(t->a, b2);
            return;
          }
          case Process::Kind::Repl:
            go(t->a, bound);
            return;
          case Process::Kind::Acc:
            if (!bound.count(t->chan)) out.insert(t->chan);
            go(t->a, bound);
            return;
        }
      };
  std::set<Name> bound;
  go(p, bound);
  return out;
}

ProcPtr subst_process(const ProcPtr& p, const std::map<Name, Value>& sub) {
  if (sub.empty()) return p;
  auto subst_name = [&](const Name& n) -> Name {
    auto it = sub.find(n);
    if (it == sub.end()) return n;
    if (it->second.kind != Value::Kind::Var)
      throw std::logic_error("boolean substituted into name position: " + n);
    return it->second.name;
  };
  auto subst_value = [&](const Value& v) -> Value {
    if (v.kind != Value::Kind::Var) return v;
    auto it = sub.find(v.name);
    return it == sub.end() ? v : it->second;
  };
  auto drop = [&](const std::map<Name, Value>& m,
                  const std::vector<Name>& names) {
    std::map<Name, Value> m2 = m;
    for (auto& n : names) m2.erase(n);
    return m2;
  };
  switch (p->kind) {
    case Process::Kind::Nil:
      return p;
    case Process::Kind::Output: {
      std::vector<Value> args;
      for (auto& v : p->args) args.push_back(subst_value(v));
      return p_out(subst_name(p->chan), std::move(args), p->attr,
                   subst_process(p->a, sub));
    }
    case Process::Kind::Input: {
      auto sub2 = drop(sub, p->params);
      return p_in(subst_name(p->chan), p->params, p->attr,
                  subst_process(p->a, sub2));
    }
    case Process::Kind::Par:
      return p_par(subst_process(p->a, sub), subst_process(p->b, sub));
    case Process::Kind::If:
      return p_if(subst_value(p->cond), subst_process(p->a, sub),
                  subst_process(p->b, sub));
    case Process::Kind::Nu: {
      auto sub2 = drop(sub, {p->chan});
      return p_nu(p->chan, subst_process(p->a, sub2));
    }
    case Process::Kind::Repl:
      return p_repl(subst_process(p->a, sub));
    case Process::Kind::Acc:
      return p_acc(subst_name(p->chan), p->acc, subst_process(p->a, sub));
    case Process::Kind::NuR: {
      auto sub2 = drop(sub, {p->chan});
      return p_nur(p->chan, p->spec, p->spec_name, subst_process(p->a, sub2));
    }
  }
  return p;
}

ProcPtr assume_all_succeed(const ProcPtr& p) {
  switch (p->kind) {
    case Process::Kind::Nil:
      return p;
    case Process::Kind::Output:
      return p_out(p->chan, p->args, Attr::Succeeds, assume_all_succeed(p->a));
    case Process::Kind::Input:
      return p_in(p->chan, p->params, Attr::Succeeds, assume_all_succeed(p->a));
    case Process::Kind::Par:
      return p_par(assume_all_succeed(p->a), assume_all_succeed(p->b));
    case Process::Kind::If:
      return p_if(p->cond, assume_all_succeed(p->a), assume_all_succeed(p->b));
    case Process::Kind::Nu:
      return p_nu(p->chan, assume_all_succeed(p->a));
    case Process::Kind::Repl:
      return p_repl(assume_all_succeed(p->a));
    case Process::Kind::Acc:
      return p_acc(p->chan, p->acc, assume_all_succeed(p->a));
    case Process::Kind::NuR:
      return p_nur(p->chan, p->spec, p->spec_name, assume_all_succeed(p->a));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Lexer.
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, End };
  Kind kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;
  explicit Lexer(const std::string& s) : src(s) {}

  void advance(size_t n) {
    for (size_t i = 0; i < n && pos < src.size(); ++i, ++pos) {
      if (src[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') advance(1);
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
      } else {
        break;
      }
    }
  }

  Token next() {
    skip_ws();
    Token t;
    t.line = line;
    t.col = col;
    if (pos >= src.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = src[pos];
    auto isid0 = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_';
    };
    auto isid = [&](char ch) {
      return isid0(ch) || (ch >= '0' && ch <= '9') || ch == '\'' || ch == '$';
    };
    if (isid0(c)) {
      size_t start = pos;
      while (pos < src.size() && isid(src[pos])) advance(1);
      t.kind = Token::Kind::Ident;
      t.text = src.substr(start, pos - start);
      return t;
    }
    if (c >= '0' && c <= '9') {
      size_t start = pos;
      while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') advance(1);
      t.kind = Token::Kind::Number;
      t.text = src.substr(start, pos - start);
      return t;
    }
    // Multi-char punctuation first.
    if (c == '!' && pos + 1 < src.size() && src[pos + 1] == '!') {
      t.kind = Token::Kind::Punct;
      t.text = "!!";
      advance(2);
      return t;
    }
    if (c == '?' && pos + 1 < src.size() && src[pos + 1] == '?') {
      t.kind = Token::Kind::Punct;
      t.text = "??";
      advance(2);
      return t;
    }
    static const std::string singles = "!?.,;=()|*+";
    if (singles.find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
};

// ---------------------------------------------------------------------------
// Parser.
// ---------------------------------------------------------------------------

struct Parser {
  Lexer lex;
  Token tok;
  std::set<std::string> labels{"I", "R", "W", "C"};
  std::map<std::string, SpecPtr> specs;
  bool allow_any_label = false;

  explicit Parser(const std::string& src) : lex(src) { tok = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, tok.line, tok.col);
  }
  void bump() { tok = lex.next(); }
  bool at_punct(const std::string& p) {
    return tok.kind == Token::Kind::Punct && tok.text == p;
  }
  bool at_ident(const std::string& w) {
    return tok.kind == Token::Kind::Ident && tok.text == w;
  }
  void expect_punct(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "'");
    bump();
  }
  std::string expect_name() {
    if (tok.kind != Token::Kind::Ident) fail("expected a name");
    std::string s = tok.text;
    bump();
    return s;
  }

  // --- spec regexes ---------------------------------------------------------

  SpecPtr spec_alt() {
    SpecPtr a = spec_cat();
    while (at_punct("+")) {
      bump();
      a = spec_union(a, spec_cat());
    }
    return a;
  }
  SpecPtr spec_cat() {
    SpecPtr a = spec_rep();
    while (tok.kind == Token::Kind::Ident || at_punct("(")) {
      a = spec_concat(a, spec_rep());
    }
    return a;
  }
  SpecPtr spec_rep() {
    SpecPtr a = spec_atom();
    while (at_punct("*")) {
      bump();
      a = spec_star(a);
    }
    return a;
  }
  SpecPtr spec_atom() {
    if (at_punct("(")) {
      bump();
      if (at_punct(")")) {    // '()' denotes the empty word
        bump();
        return spec_epsilon();
      }
      SpecPtr a = spec_alt();
      expect_punct(")");
      return a;
    }
    if (tok.kind == Token::Kind::Ident) {
      std::string s = tok.text;
      bump();
      if (s == kDown) return spec_down();
      if (!labels.count(s) && !allow_any_label)
        fail("undeclared access label '" + s + "' in spec");
      return spec_symbol(s);
    }
    fail("expected a label, 'v', or '(' in spec");
  }

  // The completion marker may only occur at the very end of a trace.
  void check_down_final(const SpecPtr& s, bool at_end) {
    switch (s->kind) {
      case TraceSpec::Kind::Down:
        if (!at_end)
          throw ParseError("'v' must be the final symbol of a spec trace",
                           tok.line, tok.col);
        return;
      case TraceSpec::Kind::Concat:
        check_down_final(s->left, false);
        check_down_final(s->right, at_end);
        return;
      case TraceSpec::Kind::Union:
        check_down_final(s->left, at_end);
        check_down_final(s->right, at_end);
        return;
      case TraceSpec::Kind::Star:
        check_down_final(s->left, false);
        return;
      default:
        return;
    }
  }

  // --- processes ------------------------------------------------------------

  static std::string acc_alias(const std::string& w) {
    if (w == "init") return "I";
    if (w == "read") return "R";
    if (w == "write") return "W";
    if (w == "close") return "C";
    return "";
  }

  Value parse_value() {
    if (at_ident("true")) {
      bump();
      return v_bool(true);
    }
    if (at_ident("false")) {
      bump();
      return v_bool(false);
    }
    return v_var(expect_name());
  }

  ProcPtr parse_par() {
    ProcPtr p = parse_prefix();
    while (at_punct("|")) {
      bump();
      p = p_par(p, parse_prefix());
    }
    return p;
  }

  ProcPtr parse_cont() {
    if (at_punct(".")) {
      bump();
      return parse_prefix();
    }
    return p_nil();
  }

  ProcPtr parse_prefix() {
    if (tok.kind == Token::Kind::Number && tok.text == "0") {
      bump();
      return p_nil();
    }
    if (at_punct("(")) {
      bump();
      ProcPtr p = parse_par();
      expect_punct(")");
      return p;
    }
    if (at_punct("*")) {
      bump();
      return p_repl(parse_prefix());
    }
    if (at_ident("new")) {
      bump();
      std::vector<Name> names;
      names.push_back(expect_name());
      while (at_punct(",")) {
        bump();
        names.push_back(expect_name());
      }
      if (!at_ident("in")) fail("expected 'in'");
      bump();
      ProcPtr body = parse_par();
      for (size_t i = names.size(); i-- > 0;) body = p_nu(names[i], body);
      return body;
    }
    if (at_ident("newR")) {
      bump();
      std::string ref;
      if (tok.kind == Token::Kind::Number || tok.kind == Token::Kind::Ident) {
        ref = tok.text;
        bump();
      } else {
        fail("expected a spec name");
      }
      auto it = specs.find(ref);
      if (it == specs.end()) fail("unknown spec '" + ref + "'");
      expect_punct(",");
      Name x = expect_name();
      if (!at_ident("in")) fail("expected 'in'");
      bump();
      return p_nur(x, it->second, ref, parse_par());
    }
    if (at_ident("if")) {
      bump();
      Value c = parse_value();
      if (!at_ident("then")) fail("expected 'then'");
      bump();
      ProcPtr t = parse_par();
      if (!at_ident("else")) fail("expected 'else'");
      bump();
      ProcPtr e = parse_par();
      return p_if(c, t, e);
    }
    if (at_ident("acc")) {
      bump();
      expect_punct("(");
      Name x = expect_name();
      expect_punct(",");
      std::string l = expect_name();
      if (!labels.count(l)) {
        std::string mapped = acc_alias(l);
        if (!mapped.empty() && labels.count(mapped)) {
          l = mapped;
        } else {
          fail("undeclared access label '" + l + "'");
        }
      }
      expect_punct(")");
      return p_acc(x, l, parse_cont());
    }
    if (tok.kind == Token::Kind::Ident && !acc_alias(tok.text).empty()) {
      // Shorthand access prefixes: init(x), read(x), write(x), close(x).
      // Only taken when the next token is '(' with a single-name body; a
      // channel that happens to be named `read` still parses as I/O because
      // I/O requires '!'/'?' right after the name.
      std::string w = tok.text;
      size_t save_pos = lex.pos;
      int save_line = lex.line, save_col = lex.col;
      Token save_tok = tok;
      bump();
      if (at_punct("(")) {
        bump();
        Name x = expect_name();
        expect_punct(")");
        return p_acc(x, acc_alias(w), parse_cont());
      }
      lex.pos = save_pos;
      lex.line = save_line;
      lex.col = save_col;
      tok = save_tok;
      // fall through to I/O parsing
    }
    if (tok.kind == Token::Kind::Ident) {
      Name subject = expect_name();
      if (at_punct("!") || at_punct("!!")) {
        Attr t = tok.text == "!!" ? Attr::Succeeds : Attr::None;
        bump();
        expect_punct("(");
        std::vector<Value> args;
        if (!at_punct(")")) {
          args.push_back(parse_value());
          while (at_punct(",")) {
            bump();
            args.push_back(parse_value());
          }
        }
        expect_punct(")");
        return p_out(subject, std::move(args), t, parse_cont());
      }
      if (at_punct("?") || at_punct("??")) {
        Attr t = tok.text == "??" ? Attr::Succeeds : Attr::None;
        bump();
        expect_punct("(");
        std::vector<Name> params;
        if (!at_punct(")")) {
          params.push_back(expect_name());
          while (at_punct(",")) {
            bump();
            params.push_back(expect_name());
          }
        }
        expect_punct(")");
        return p_in(subject, std::move(params), t, parse_cont());
      }
      fail("expected '!', '?', '!!' or '?" "?' after name '" + subject + "'");
    }
    fail("expected a process");
  }
};

// Renames bound names apart: the first binder of a base name keeps it, later
// binders of the same base get base$2, base$3, ... in traversal order.
struct AlphaRenamer {
  std::map<Name, int> uses;

  Name fresh(const Name& base) {
    int& n = uses[base];
    ++n;
    if (n == 1) return base;
    return base + "$" + std::to_string(n);
  }

  ProcPtr go(const ProcPtr& p, std::map<Name, Name>& env) {
    auto ren = [&](const Name& n) {
      auto it = env.find(n);
      return it == env.end() ? n : it->second;
    };
    auto renv = [&](const Value& v) {
      if (v.kind != Value::Kind::Var) return v;
      return v_var(ren(v.name));
    };
    switch (p->kind) {
      case Process::Kind::Nil:
        return p;
      case Process::Kind::Output: {
        std::vector<Value> args;
        for (auto& v : p->args) args.push_back(renv(v));
        return p_out(ren(p->chan), std::move(args), p->attr, go(p->a, env));
      }
      case Process::Kind::Input: {
        std::vector<Name> params;
        std::map<Name, Name> env2 = env;
        for (auto& y : p->params) {
          Name f = fresh(y);
          env2[y] = f;
          params.push_back(f);
        }
        return p_in(ren(p->chan), std::move(params), p->attr, go(p->a, env2));
      }
      case Process::Kind::Par:
        return p_par(go(p->a, env), go(p->b, env));
      case Process::Kind::If:
        return p_if(renv(p->cond), go(p->a, env), go(p->b, env));
      case Process::Kind::Nu: {
        std::map<Name, Name> env2 = env;
        Name f = fresh(p->chan);
        env2[p->chan] = f;
        return p_nu(f, go(p->a, env2));
      }
      case Process::Kind::Repl:
        return p_repl(go(p->a, env));
      case Process::Kind::Acc:
        return p_acc(ren(p->chan), p->acc, go(p->a, env));
      case Process::Kind::NuR: {
        std::map<Name, Name> env2 = env;
        Name f = fresh(p->chan);
        env2[p->chan] = f;
        return p_nur(f, p->spec, p->spec_name, go(p->a, env2));
      }
    }
    return p;
  }
};

}  // namespace

Program parse_program(const std::string& source) {
  Parser ps(source);
  Program prog;
  // Header declarations.
  for (;;) {
    if (ps.at_ident("label")) {
      ps.bump();
      ps.labels.insert(ps.expect_name());
      while (ps.at_punct(",")) {
        ps.bump();
        ps.labels.insert(ps.expect_name());
      }
      ps.expect_punct(";");
      continue;
    }
    if (ps.at_ident("spec")) {
      ps.bump();
      std::string name;
      if (ps.tok.kind == Token::Kind::Number ||
          ps.tok.kind == Token::Kind::Ident) {
        name = ps.tok.text;
        ps.bump();
      } else {
        ps.fail("expected a spec name");
      }
      ps.expect_punct("=");
      if (!ps.at_ident("pref")) ps.fail("expected 'pref'");
      ps.bump();
      ps.expect_punct("(");
      SpecPtr re = ps.spec_alt();
      ps.expect_punct(")");
      ps.expect_punct(";");
      ps.check_down_final(re, true);
      if (ps.specs.count(name)) ps.fail("duplicate spec '" + name + "'");
      ps.specs[name] = re;
      continue;
    }
    break;
  }
  ProcPtr body = ps.parse_par();
  if (ps.tok.kind != Token::Kind::End) ps.fail("trailing input after process");
  prog.labels.assign(ps.labels.begin(), ps.labels.end());
  prog.specs = ps.specs;
  AlphaRenamer ar;
  // Seed with the program's free names so no binder is renamed onto one.
  for (auto& n : free_names(body)) ar.uses[n] = 1;
  std::map<Name, Name> env;
  prog.proc = ar.go(body, env);
  return prog;
}

SpecPtr parse_spec(const std::string& source) {
  Parser ps(source);
  ps.allow_any_label = true;  // bare regexes (tests, tools) skip declarations
  SpecPtr re = ps.spec_alt();
  if (ps.tok.kind != Token::Kind::End)
    ps.fail("trailing input after spec regex");
  ps.check_down_final(re, true);
  return re;
}

}  // namespace rua
