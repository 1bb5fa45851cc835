// Tests for behavioral types: transitions, access traces, the disabled
// predicate, weak simulation, and the algebraic law suites.
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "properties.hpp"
#include "rua/behavior.hpp"
#include "support.hpp"

using namespace rua;
using namespace ruatest;

namespace {

using Word = std::vector<std::string>;
using Words = std::set<Word>;

BPtr xacc(const std::string& l, BPtr cont) {
  return b_act(act_acc("x", l), Attr::None, cont);
}

Words words_of(const BPtr& t, int k, bool ext) {
  TraceSet ts = traces_bounded(t, "x", k, ext);
  REQUIRE(!ts.partial);
  return ts.words;
}

}  // namespace

TEST_CASE("traces: a small access chain, basic and extended") {
  BPtr t = xacc("I", xacc("R", b_zero()));
  CHECK(words_of(t, 3, false) == Words{{}, {"I"}, {"I", "R"}});
  CHECK(words_of(t, 3, true) ==
        Words{{}, {"I"}, {"I", "R"}, {"I", "R", kDown}});
  CHECK(words_of(b_zero(), 2, false) == Words{{}});
  CHECK(words_of(b_zero(), 2, true) == Words{{}, {kDown}});
}

TEST_CASE("traces: internal choice commits, stops only where disabled") {
  BPtr t = b_choice(xacc("I", b_zero()), xacc("R", b_zero()));
  CHECK(words_of(t, 2, false) == Words{{}, {"I"}, {"R"}});
  CHECK(words_of(t, 2, true) ==
        Words{{}, {"I"}, {"R"}, {"I", kDown}, {"R", kDown}});
}

TEST_CASE("traces: parallel interleaving with a synchronised channel") {
  BPtr t = b_hide("a", b_par(b_act(act_out("a"), Attr::None, xacc("R", b_zero())),
                             b_act(act_in("a"), Attr::None, xacc("W", b_zero()))));
  CHECK(words_of(t, 4, false) ==
        Words{{}, {"R"}, {"W"}, {"R", "W"}, {"W", "R"}});
}

TEST_CASE("traces: restriction blocks a lone hidden action") {
  BPtr t = b_hide("a", b_act(act_out("a"), Attr::None, xacc("R", b_zero())));
  CHECK(words_of(t, 3, false) == Words{{}});
  // with no partner and no succeeds-annotation the state is disabled
  CHECK(words_of(t, 3, true) == Words{{}, {kDown}});

  // the same action marked as eventually succeeding is not disabled
  BPtr u = b_hide("a", b_act(act_out("a"), Attr::Succeeds, xacc("R", b_zero())));
  CHECK(words_of(u, 3, true) == Words{{}});
}

TEST_CASE("traces: projection and exclusion turn actions silent") {
  BPtr t = b_project(b_act(act_out("a"), Attr::None, xacc("R", b_zero())),
                     {"x"});
  CHECK(words_of(t, 2, false) == Words{{}, {"R"}});
  BPtr u = b_exclude(xacc("R", b_zero()), {"x"});
  CHECK(words_of(u, 2, false) == Words{{}});
  BPtr v = b_rename({{"y", "x"}}, b_act(act_acc("y", "R"), Attr::None, b_zero()));
  CHECK(words_of(v, 2, false) == Words{{}, {"R"}});
}

TEST_CASE("traces: guarded recursion unrolls to the bound") {
  BPtr t = b_rec("al", xacc("R", b_var("al")));
  CHECK(words_of(t, 3, false) == Words{{}, {"R"}, {"R", "R"}, {"R", "R", "R"}});
  // never disabled, so no stop marker anywhere
  CHECK(words_of(t, 3, true) == Words{{}, {"R"}, {"R", "R"}, {"R", "R", "R"}});
}

TEST_CASE("traces: an unbounded silent layer reports partiality") {
  BPtr t = b_repl(b_act(act_tau(), Attr::None, xacc("R", b_zero())));
  TraceSet ts = traces_bounded(t, "x", 2, false, 50);
  CHECK(ts.partial);
}

TEST_CASE("disabled: attributes decide whether a prefix can be waited out") {
  CHECK(disabled(b_zero(), {"x"}));
  CHECK(!disabled(xacc("R", b_zero()), {"x"}));
  CHECK(disabled(xacc("R", b_zero()), {}));                  // x not observed
  CHECK(disabled(b_act(act_out("a"), Attr::None, xacc("R", b_zero())), {"x"}));
  CHECK(!disabled(b_act(act_out("a"), Attr::Succeeds, xacc("R", b_zero())),
                  {"x"}));
  // silent actions always fire
  CHECK(!disabled(b_act(act_tau(), Attr::None, xacc("R", b_zero())), {"x"}));
}

TEST_CASE("disabled: the silent residue of an erased action keeps its attribute") {
  BPtr succ = b_exclude(b_act(act_out("a"), Attr::Succeeds, xacc("R", b_zero())),
                        {"a"});
  BPtr plain = b_exclude(b_act(act_out("a"), Attr::None, xacc("R", b_zero())),
                         {"a"});
  CHECK(!disabled(succ, {"x"}));
  CHECK(disabled(plain, {"x"}));
  // and a projection erasing the action behaves the same way
  BPtr psucc = b_project(b_act(act_out("a"), Attr::Succeeds, xacc("R", b_zero())),
                         {"x"});
  BPtr pplain = b_project(b_act(act_out("a"), Attr::None, xacc("R", b_zero())),
                          {"x"});
  CHECK(!disabled(psucc, {"x"}));
  CHECK(disabled(pplain, {"x"}));
}

TEST_CASE("simulation: worked pairs, basic and extended") {
  BPtr xi = xacc("I", b_zero());
  BPtr choice = b_choice(xi, xacc("R", b_zero()));
  CHECK(simulates(xi, choice, false).holds);
  CHECK(!simulates(choice, xi, false).holds);

  // adding a stuck branch is invisible to plain simulation but not to the
  // extended relation, which must preserve disabledness
  BPtr maybe_stop = b_choice(xi, b_zero());
  CHECK(simulates(maybe_stop, xi, false).holds);
  CHECK(!simulates(maybe_stop, xi, true).holds);
  CHECK(simulates(xi, maybe_stop, true).holds);
}

TEST_CASE("simulation: synchronisation pairs survive renaming") {
  // [b/a](a!.0 | b?.x^R.0) must offer the same silent step as b!.0 | b?.x^R.0
  BPtr lhs = b_rename({{"a", "b"}},
                      b_par(b_act(act_out("a"), Attr::None, b_zero()),
                            b_act(act_in("b"), Attr::None, xacc("R", b_zero()))));
  BPtr rhs = b_par(b_act(act_out("b"), Attr::None, b_zero()),
                   b_act(act_in("b"), Attr::None, xacc("R", b_zero())));
  CHECK(simulates(lhs, rhs, false).holds);
  CHECK(simulates(rhs, lhs, false).holds);
  // hiding the channel leaves only that synchronisation
  CHECK(words_of(b_hide("b", lhs), 2, false) == Words{{}, {"R"}});
}

TEST_CASE("equivalence-law suite (simulation both ways, 200 instances per law)") {
  PropResult r = prop_equivalence_laws(1234, 200);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("simulation implies bounded trace inclusion") {
  PropResult r = prop_sim_implies_traces(1235, 100);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("recursion: unfolding is invisible to traces") {
  std::mt19937 gen(1236);
  for (int i = 0; i < 100; ++i) {
    BPtr r = random_guarded_rec(gen);
    if (r->kind != BType::Kind::Rec) continue;
    // a variable occurring twice doubles the state on every unfolding, and
    // the closure's printed state keys grow exponentially with it
    if (!linear_recs_only(r)) continue;
    BPtr unfolded = b_subst_var(r->a, r->name, r);
    for (bool ext : {false, true}) {
      TraceSet a = traces_bounded(r, "x", 5, ext);
      TraceSet b = traces_bounded(unfolded, "x", 5, ext);
      if (a.partial || b.partial) continue;
      CHECK(a.words == b.words);
    }
  }
}

TEST_CASE("transitions are deterministic and deduplicated") {
  std::mt19937 gen(1237);
  for (int i = 0; i < 100; ++i) {
    BPtr t = random_btype(gen, 5);
    auto a = tstep(t);
    auto b = tstep(t);
    REQUIRE(a.size() == b.size());
    std::set<std::string> seen;
    for (size_t j = 0; j < a.size(); ++j) {
      CHECK(print_tlabel(a[j].first) == print_tlabel(b[j].first));
      CHECK(print_btype(a[j].second) == print_btype(b[j].second));
      CHECK(seen.insert(print_tlabel(a[j].first) + "\x01" +
                        print_btype(a[j].second))
                .second);
    }
  }
}
