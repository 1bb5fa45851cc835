// rua_main.cpp - command-line front end: parse -> infer -> check -> report.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rua/checker.hpp"
#include "rua/normalize.hpp"
#include "rua/semantics.hpp"

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dfa_dump(const rua::Dfa& d) {
  std::ostringstream os;
  os << "(*** Spec automaton: " << d.states << " states, start q" << d.start
     << ", every state accepting ***)\n";
  for (auto& [key, tgt] : d.delta)
    os << "q" << key.first << " -" << key.second << "-> q" << tgt << "\n";
  return os.str();
}

std::string word_str(const std::vector<std::string>& w) {
  std::string s;
  for (auto& sym : w) s += sym;
  return s.empty() ? "(empty)" : s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rua - static resource-usage analyzer for pi-calculus programs"};

  std::string input_path;
  std::string mode = "safety";
  int cap = 3;
  int atom_bound = 2000;
  int oracle_depth = -1;
  int seed = 0;
  bool dump_types = false, dump_basis = false, dump_petri = false,
       dump_dfa = false, as_json = false, assume_succeed = false;

  app.add_option("input", input_path, "program file")->required();
  app.add_option("--mode", mode, "safety | liveness")
      ->check(CLI::IsMember({"safety", "liveness"}));
  app.add_option("--cap", cap, "token counter cap (default 3)")
      ->check(CLI::PositiveNumber);
  app.add_option("--atom-bound", atom_bound, "basis size bound");
  app.add_option("--oracle", oracle_depth,
                 "also run the exact state explorer to this depth");
  app.add_option("--seed", seed, "fresh-name numbering offset");
  app.add_flag("--dump-types", dump_types, "print inferred types");
  app.add_flag("--dump-basis", dump_basis, "print hidden names and atoms");
  app.add_flag("--dump-petri", dump_petri, "print nets as DOT");
  app.add_flag("--dump-dfa", dump_dfa, "print spec automata");
  app.add_flag("--json", as_json, "machine-readable output");
  app.add_flag("--assume-all-succeed", assume_succeed,
               "mark every communication as eventually succeeding");

  CLI11_PARSE(app, argc, argv);

  const bool liveness = mode == "liveness";
  rua::reset_fresh_names(static_cast<long>(seed) * 1000000L);

  rua::Program prog;
  rua::InferResult inf;
  try {
    prog = rua::parse_program(read_file(input_path));
    if (assume_succeed) {
      std::cerr << "warning: --assume-all-succeed: input contract "
                   "(well-annotatedness) not verified\n";
      prog.proc = rua::assume_all_succeed(prog.proc);
    }
    inf = rua::infer(prog, seed);
  } catch (const rua::ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": "
              << e.what() << "\n";
    return 2;
  } catch (const rua::TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  rua::CheckOptions opt;
  opt.extended = liveness;
  opt.cap = cap;
  opt.atom_bound = atom_bound;

  std::vector<rua::CheckResult> results;
  for (auto& ob : inf.obligations) results.push_back(check_inclusion(ob, opt));
  bool all_safe = true;
  for (auto& r : results) all_safe = all_safe && r.safe;

  // Optional exact exploration, reported alongside the static verdict.
  bool oracle_ran = oracle_depth >= 0;
  rua::ExploreResult oracle;
  if (oracle_ran)
    oracle = rua::explore(prog.proc, oracle_depth, 50000, liveness);

  if (as_json) {
    json top;
    top["mode"] = mode;
    top["input"] = input_path;
    top["results"] = json::array();
    for (auto& r : results) {
      json jr;
      jr["resource"] = r.resource;
      jr["spec"] = r.spec_name;
      jr["verdict"] = r.safe ? "Safe" : "PossiblyUnsafe";
      if (!r.witness.empty()) jr["witness"] = r.witness;
      jr["approximations"] = r.approximations;
      jr["stats"] = {{"places", r.places},
                     {"transitions", r.transitions},
                     {"abstract_states", r.abstract_states},
                     {"millis", r.millis}};
      top["results"].push_back(std::move(jr));
    }
    if (oracle_ran) {
      json jo;
      jo["states"] = oracle.states;
      jo["truncated"] = oracle.truncated;
      jo["safety_violation"] = oracle.safety_violation;
      if (liveness) jo["liveness_violation"] = oracle.liveness_violation;
      if (oracle.safety_violation || oracle.liveness_violation) {
        jo["witness"] = oracle.witness;
        jo["bad_state"] = oracle.bad_state;
      }
      top["oracle"] = std::move(jo);
    }
    std::cout << top.dump(2) << "\n";
  } else {
    std::cout << "(*** The result of "
              << (liveness ? "lock-freedom" : "resource-usage")
              << " analysis ***)\n";
    std::cout << rua::print_process(prog.proc) << "\n";

    if (dump_types) {
      std::cout << "(*** Types ***)\n";
      for (auto& [n, t] : inf.env)
        std::cout << n << " : " << rua::print_vtype(t) << "\n";
      std::cout << "process : " << rua::print_btype(inf.type) << "\n";
    }

    std::cout << "(*** Constraints ***)\n";
    for (auto& ob : inf.obligations)
      std::cout << (liveness ? "etrace(" : "trace(") << ob.res << ", "
                << rua::print_btype(ob.body) << ") is included in "
                << ob.spec_name << "\n";

    for (auto& r : results) {
      if (dump_basis) {
        std::cout << "(*** Hidden names for " << r.resource << " ***)\n";
        for (auto& h : r.net.hidden) std::cout << h << "\n";
      }
      std::cout << rua::net_dump_text(r.net);
      if (dump_petri) std::cout << rua::net_dump_dot(r.net);
      if (dump_dfa) std::cout << dfa_dump(r.dfa);
      if (!r.approximations.empty()) {
        std::cout << "approximated:";
        for (auto& a : r.approximations) std::cout << " " << a;
        std::cout << "\n";
      }
      if (!r.safe) {
        std::cout << "Possible violation of spec " << r.spec_name
                  << " on resource " << r.resource << ":\n";
        for (auto& w : r.witness) std::cout << "  " << w << "\n";
      }
    }

    if (oracle_ran) {
      std::cout << "(*** Oracle: exact exploration to depth " << oracle_depth
                << " ***)\n";
      std::cout << "states: " << oracle.states
                << (oracle.truncated ? " (truncated)" : "") << "\n";
      if (oracle.safety_violation || oracle.liveness_violation) {
        std::cout << "oracle: "
                  << (oracle.safety_violation ? "access outside spec"
                                              : "stuck with required access")
                  << " found:\n";
        for (auto& w : oracle.witness) std::cout << "  " << w << "\n";
        std::cout << "  state: " << oracle.bad_state << "\n";
        if (all_safe)
          std::cout << "WARNING: static verdict Safe disagrees with the "
                       "oracle; please report this\n";
      } else {
        std::cout << "oracle: no violation within depth " << oracle_depth
                  << "\n";
      }
    }

    std::cout << (all_safe ? "No error found" : "Possible error found")
              << "\n";
  }
  return all_safe ? 0 : 1;
}
