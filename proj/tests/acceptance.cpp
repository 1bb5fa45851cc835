// Acceptance gate: seven end-to-end checks, one pass/fail line each.
// Exits nonzero if any check fails.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "properties.hpp"
#include "rua/checker.hpp"
#include "rua/inference.hpp"
#include "rua/petri.hpp"
#include "rua/semantics.hpp"
#include "rua/syntax.hpp"
#include "support.hpp"

using namespace rua;
using namespace ruatest;

namespace {

int g_failed = 0;

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void line(int id, const std::string& name, bool ok, double secs,
          const std::string& note) {
  if (!ok) ++g_failed;
  std::printf("[%d] %-46s %s  (%6.2fs)%s%s\n", id, name.c_str(),
              ok ? "PASS" : "FAIL", secs, note.empty() ? "" : "  ",
              note.c_str());
}

CheckResult run_check(const char* src, bool extended, size_t index = 0) {
  InferResult ir = infer(parse_program(src));
  if (ir.obligations.size() <= index)
    throw std::runtime_error("fixture produced no obligation");
  CheckOptions opt;
  opt.extended = extended;
  return check_inclusion(ir.obligations[index], opt);
}

// 1. Fork-join readers: verified safe; dropping one join receive is flagged,
//    and the exhaustive interpreter confirms the flag is a real violation.
void crit1() {
  auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = true;
  try {
    auto ta = std::chrono::steady_clock::now();
    CheckResult good = run_check(kCobegin, false);
    double d1 = secs_since(ta);

    ta = std::chrono::steady_clock::now();
    CheckResult bad = run_check(kCobeginMutant, false);
    double d2 = secs_since(ta);

    ExploreResult ga = explore(parse_program(kCobegin).proc, 12);
    ExploreResult gb = explore(parse_program(kCobeginMutant).proc, 12);

    ok = good.safe && !bad.safe && !bad.witness.empty() &&
         !ga.safety_violation && !ga.truncated && gb.safety_violation &&
         d1 < 2.0 && d2 < 2.0;
    note = "verdicts " + std::string(good.safe ? "safe" : "flagged") + "/" +
           (bad.safe ? "safe" : "flagged") + ", oracle " +
           (gb.safety_violation ? "confirms" : "missed") + " the mutant";
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  line(1, "fork-join readers + mutant + oracle", ok, secs_since(t0), note);
}

// 2. Recursive reader: safe in safety mode; the annotated variant is safe in
//    liveness mode; dropping the final close is flagged in liveness mode.
void crit2() {
  auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = true;
  try {
    CheckResult safety = run_check(kRepeatRead, false);
    CheckResult live = run_check(kRepeatReadLive, true);
    CheckResult mut = run_check(kRepeatReadLiveMutant, true);
    ok = safety.safe && live.safe && !mut.safe && !mut.witness.empty();
    note = std::string("safety ") + (safety.safe ? "safe" : "flagged") +
           ", liveness " + (live.safe ? "safe" : "flagged") + ", mutant " +
           (mut.safe ? "safe" : "flagged");
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  double d = secs_since(t0);
  line(2, "recursive reader, safety and liveness", ok && d < 10.0, d, note);
}

// 3. Producer/consumer alternation; handing the first token to the get side
//    is flagged.
void crit3() {
  auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = true;
  try {
    CheckResult good = run_check(kProdCons, false);
    CheckResult bad = run_check(kProdConsMutant, false);
    ok = good.safe && !bad.safe && !bad.witness.empty();
    note = std::string("verdicts ") + (good.safe ? "safe" : "flagged") + "/" +
           (bad.safe ? "safe" : "flagged");
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  double d = secs_since(t0);
  line(3, "producer/consumer alternation + mutant", ok && d < 5.0, d, note);
}

// 4. Fresh-resource server: verified live, report ends "No error found", and
//    the dumped net has the pinned size.
void crit4() {
  auto t0 = std::chrono::steady_clock::now();
  std::string note;
  bool ok = true;
  try {
    InferResult ir = infer(parse_program(kSampleRun));
    bool all_safe = !ir.obligations.empty();
    long places = 0, transitions = 0;
    std::string dump;
    CheckOptions opt;
    opt.extended = true;
    for (auto& ob : ir.obligations) {
      CheckResult r = check_inclusion(ob, opt);
      all_safe = all_safe && r.safe;
      places = r.places;
      transitions = r.transitions;
      dump = net_dump_text(r.net);
    }
    std::string report = all_safe ? "No error found" : "Possible error found";
    bool pins = dump.find("(*** 14 Places ***)") != std::string::npos &&
                dump.find("(*** 9 Transitions ***)") != std::string::npos;
    ok = all_safe && report == "No error found" && pins;
    note = "report '" + report + "', net " + std::to_string(places) +
           " places / " + std::to_string(transitions) + " transitions";
    if (!pins)
      note += " (pinned 14/9)";
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  line(4, "fresh-resource server, live + pinned net", ok, secs_since(t0),
       note);
}

// 5. Soundness fuzz: 500 random well-typed programs; no program both passes
//    the static check and violates its binder language in the interpreter.
void crit5() {
  auto t0 = std::chrono::steady_clock::now();
  FuzzStats st;
  PropResult r = prop_soundness_fuzz(9005, 500, &st);
  double d = secs_since(t0);
  std::string note = r.ok ? "" : r.detail + "; ";
  note += std::to_string(st.checked) + " checked, " +
          std::to_string(st.safe) + " safe, " + std::to_string(st.flagged) +
          " flagged, " + std::to_string(st.truncated) + " truncated";
  line(5, "soundness fuzz, 500 programs", r.ok && st.checked >= 500 && d < 300,
       d, note);
}

// 6. Property suites at full size.
void crit6() {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, PropResult>> rs;
  rs.emplace_back("equivalence laws", prop_equivalence_laws(9006, 200));
  rs.emplace_back("simulation=>traces", prop_sim_implies_traces(9007, 100));
  rs.emplace_back("restriction lifting", prop_lift_nu_overapprox(9008, 100));
  rs.emplace_back("scoping elimination", prop_elim_preserves_traces(9009, 100));
  rs.emplace_back("basis decomposition", prop_basis_decompose(9010, 100));
  rs.emplace_back("net/LTS traces", prop_net_lts_agree(9011, 100));
  rs.emplace_back("abstraction soundness", prop_abstraction_sound(9012, 100));
  rs.emplace_back("product<=>traces", prop_product_iff_traces(9013, 100));
  rs.emplace_back("disabled lifting", prop_pdisabled_agree(9014, 100));
  rs.emplace_back("DFA membership", prop_dfa_membership(9015, 1000));
  bool ok = true;
  std::string note;
  int passed = 0;
  for (auto& [name, r] : rs) {
    if (r.ok) {
      ++passed;
    } else {
      ok = false;
      if (!note.empty()) note += "; ";
      note += name + ": " + r.detail;
    }
  }
  if (ok)
    note = "all " + std::to_string(passed) + " suites green";
  line(6, "property suites", ok, secs_since(t0), note);
}

// 7. Subject reduction: interpreter traces of random programs are contained
//    in the traces of their inferred types.
void crit7() {
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  PropResult r = prop_subject_reduction(9016, 100, &checked);
  std::string note = r.ok ? std::to_string(checked) + " programs checked"
                          : r.detail;
  line(7, "subject reduction, 100 programs", r.ok && checked == 100,
       secs_since(t0), note);
}

}  // namespace

int main() {
  std::printf("=== acceptance gate ===\n");
  crit1();
  crit2();
  crit3();
  crit4();
  crit5();
  crit6();
  crit7();
  if (g_failed == 0)
    std::printf("=== all 7 criteria passed ===\n");
  else
    std::printf("=== %d criteria FAILED ===\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
