// Tests for the normalization pipeline: restriction lifting, elimination of
// the static operators (exclusion, projection, renaming), and the closure
// into a finite basis of sequential atoms.
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "properties.hpp"
#include "rua/behavior.hpp"
#include "rua/normalize.hpp"
#include "support.hpp"

using namespace rua;
using namespace ruatest;

namespace {

BPtr xacc(const std::string& l, BPtr cont) {
  return b_act(act_acc("x", l), Attr::None, cont);
}

}  // namespace

TEST_CASE("restriction lifting: a nested binder hoists to the top, renamed fresh") {
  BPtr inner = b_hide("r", b_act(act_in("r"), Attr::None, b_zero()));
  BPtr t = b_act(act_out("a"), Attr::None, inner);
  NuLifted nl = lift_nu(t);
  REQUIRE(nl.hidden.size() == 1);
  CHECK(nl.hidden[0] != "r");                      // renamed apart
  CHECK(!nl.approx);
  std::set<Name> fv = btype_free_names(nl.body);
  CHECK(fv.count(nl.hidden[0]));                   // now free in the body
  // and no restriction remains anywhere in the lifted body
  std::function<bool(const BPtr&)> has_hide = [&](const BPtr& u) {
    if (!u) return false;
    if (u->kind == BType::Kind::Hide) return true;
    return has_hide(u->a) || has_hide(u->b);
  };
  CHECK(!has_hide(nl.body));
}

TEST_CASE("restriction lifting: crossing a replication or recursion is approximate") {
  // the bound name must be used below the binder, or the constructor drops
  // the restriction as a no-op before lifting even sees it
  BPtr t = b_repl(b_hide("r", b_act(act_in("r"), Attr::None,
                                    xacc("R", b_zero()))));
  CHECK(lift_nu(t).approx);
  BPtr u = b_rec("v", b_act(act_out("a"), Attr::None,
                            b_hide("r", b_act(act_out("r"), Attr::None,
                                              b_var("v")))));
  CHECK(lift_nu(u).approx);
  // hoisting out of choice/parallel/prefix contexts is exact
  BPtr w = b_choice(b_hide("r", b_act(act_in("r"), Attr::None,
                                      xacc("R", b_zero()))),
                    xacc("W", b_zero()));
  CHECK(!lift_nu(w).approx);
}

TEST_CASE("restriction lifting: a binder crossing a projection joins its name set") {
  // the free channel c keeps the projection from being an identity (which
  // the constructor would collapse)
  BPtr body = b_par(xacc("R", b_zero()),
                    b_act(act_out("r"), Attr::None,
                          b_act(act_out("c"), Attr::None, b_zero())));
  BPtr t = b_project(b_hide("r", body), {"x"});
  NuLifted nl = lift_nu(t);
  REQUIRE(nl.hidden.size() == 1);
  REQUIRE(nl.body->kind == BType::Kind::Project);
  CHECK(nl.body->names.count("x"));
  CHECK(nl.body->names.count(nl.hidden[0]));       // the projection keeps it
  for (bool ext : {false, true}) {
    TraceSet before = traces_bounded(t, "x", 4, ext);
    TraceSet after = traces_bounded(hide_all(nl.hidden, nl.body), "x", 4, ext);
    CHECK(before.words == after.words);
  }
}

TEST_CASE("exclusion elimination: an erased recursive action becomes a silent loop") {
  BPtr rec = b_rec("al", b_act(act_out("x"), Attr::None, b_var("al")));
  BPtr t = elim_exclude(b_exclude(rec, {"x"}));
  REQUIRE(t->kind == BType::Kind::Rec);
  REQUIRE(t->a->kind == BType::Kind::Act);
  CHECK(t->a->act.kind == TAction::Kind::Tau);
  CHECK(t->a->a->kind == BType::Kind::Var);
  CHECK(t->a->a->name == t->name);
}

TEST_CASE("renaming elimination: substitutions compose inner-first") {
  BPtr t = b_rename({{"a", "b"}},
                    b_rename({{"b", "a"}},
                             b_act(act_out("b"), Attr::None, b_zero())));
  // inner maps b->a, outer maps a->b: the action ends up on b
  BPtr e = elim_scoping(t);
  REQUIRE(e->kind == BType::Kind::Act);
  CHECK(e->act.kind == TAction::Kind::Out);
  CHECK(e->act.name == "b");

  BPtr u = b_rename({{"a", "b"}, {"b", "a"}},        // a swap, applied once
                    b_act(act_out("a"), Attr::None,
                          b_act(act_out("b"), Attr::None, b_zero())));
  BPtr eu = elim_scoping(u);
  REQUIRE(eu->kind == BType::Kind::Act);
  CHECK(eu->act.name == "b");
  CHECK(eu->a->act.name == "a");
}

TEST_CASE("the elimination order is a contract") {
  CHECK_THROWS_AS(elim_project(b_exclude(xacc("R", b_zero()), {"x"})),
                  std::logic_error);
  // the extra free channel keeps the projection from collapsing to identity
  CHECK_THROWS_AS(elim_rename(b_project(
                      b_par(xacc("R", b_zero()),
                            b_act(act_out("c"), Attr::None, b_zero())),
                      {"x"})),
                  std::logic_error);
}

TEST_CASE("parallel leaves: decomposition drops units and keeps order") {
  BPtr a = xacc("I", b_zero()), b = xacc("R", b_zero()), c = xacc("C", b_zero());
  auto leaves = par_leaves(b_par(a, b_par(b, c)));
  REQUIRE(leaves.size() == 3);
  CHECK(print_btype(leaves[0]) == print_btype(a));
  CHECK(print_btype(leaves[1]) == print_btype(b));
  CHECK(print_btype(leaves[2]) == print_btype(c));
  CHECK(par_leaves(a).size() == 1);
  CHECK(par_leaves(b_zero()).empty());
}

TEST_CASE("basis closure: the two-component handshake yields four atoms") {
  BPtr b1 = xacc("I", b_act(act_out("r"), Attr::None, b_zero()));
  BPtr b3 = b_act(act_in("r"), Attr::None, xacc("C", b_zero()));
  Basis bs = basis_closure(b_par(b1, b3), {"r"});
  CHECK(!bs.atom_bound);
  CHECK(bs.atoms.size() == 4);
  REQUIRE(bs.initial.size() == 2);
  CHECK(bs.initial[0] != bs.initial[1]);
  REQUIRE(bs.hidden.size() == 1);
  CHECK(bs.hidden[0] == "r");
  // each successor entry points at interned atoms
  for (auto& succs : bs.succs)
    for (auto& s : succs)
      for (int id : s.produce) {
        CHECK(id >= 0);
        CHECK(id < (int)bs.atoms.size());
      }
}

TEST_CASE("basis closure: an unfolded recursion folds back to a single atom") {
  BPtr rec = b_rec("al", b_act(act_out("h"), Attr::None, b_var("al")));
  BPtr unfolded = b_subst_var(rec->a, "al", rec);
  Basis bs = basis_closure(unfolded, {"h"});
  CHECK(bs.atoms.size() == 1);
  REQUIRE(bs.succs.size() == 1);
  // its single transition loops back to itself
  REQUIRE(bs.succs[0].size() == 1);
  REQUIRE(bs.succs[0][0].produce.size() == 1);
  CHECK(bs.succs[0][0].produce[0] == 0);
}

TEST_CASE("basis closure: replication contributes itself plus its derivatives") {
  BPtr a = xacc("R", xacc("W", b_zero()));
  Basis bs = basis_closure(b_repl(a), {});
  // *A, W-continuation; the spent copy folds away as it reaches 0
  CHECK(!bs.atom_bound);
  bool saw_repl = false;
  for (auto& atom : bs.atoms)
    if (atom->kind == BType::Kind::Repl) saw_repl = true;
  CHECK(saw_repl);
  CHECK(bs.atoms.size() == 2);
}

TEST_CASE("basis closure: the atom bound is reported, not overrun") {
  BPtr chain = b_zero();
  for (int i = 0; i < 8; ++i)
    chain = b_act(act_out("h"), Attr::None, chain);
  Basis bs = basis_closure(chain, {"h"}, 3);
  CHECK(bs.atom_bound);
  CHECK((int)bs.atoms.size() <= 4);
}

TEST_CASE("lifting over-approximates traces; exact when no flag is raised") {
  PropResult r = prop_lift_nu_overapprox(4321, 100);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("elimination passes preserve bounded traces exactly") {
  PropResult r = prop_elim_preserves_traces(4322, 100);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("every transition of every atom decomposes into known atoms") {
  PropResult r = prop_basis_decompose(4323, 100);
  CHECK_MESSAGE(r.ok, r.detail);
}
