#include "relay_harvest/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relay_harvest {

using nlohmann::ordered_json;

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

void reject_unknown(const ordered_json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw SchemaError("unknown field '" + it.key() + "' in " + where);
    }
  }
}

ordered_json num_array(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(round12(x));
  return a;
}

std::vector<double> to_vec(const ordered_json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.get<double>());
  return v;
}

}  // namespace

ModeSet mode_set_from_tokens(const std::vector<std::string>& tokens) {
  ModeSet m;
  for (const auto& t : tokens) {
    if (t == "bc") {
      m = m.with(Mode::Broadcast);
    } else if (t == "mac") {
      m = m.with(Mode::MultiAccess);
    } else if (t == "sr_i") {
      m = m.with(Mode::SuccessiveI);
    } else if (t == "sr_ii") {
      m = m.with(Mode::SuccessiveII);
    } else {
      throw SchemaError("unknown mode token '" + t + "'");
    }
  }
  return m;
}

std::vector<std::string> mode_set_tokens(ModeSet m) {
  std::vector<std::string> out;
  if (m.contains(Mode::Broadcast)) out.push_back("bc");
  if (m.contains(Mode::MultiAccess)) out.push_back("mac");
  if (m.contains(Mode::SuccessiveI)) out.push_back("sr_i");
  if (m.contains(Mode::SuccessiveII)) out.push_back("sr_ii");
  return out;
}

ModeSet parse_mode_flag(const std::string& flag) {
  ModeSet m = ModeSet::sr();
  std::stringstream ss(flag);
  std::string tok;
  bool any = false;
  while (std::getline(ss, tok, '+')) {
    any = true;
    if (tok == "sr") {
      continue;  // successive phases are always present
    } else if (tok == "bc") {
      m = m.with(Mode::Broadcast);
    } else if (tok == "mac") {
      m = m.with(Mode::MultiAccess);
    } else if (tok == "all") {
      m = ModeSet::all();
    } else {
      throw SchemaError("unknown mode flag '" + tok + "' (use sr, bc+sr, mac+sr, all)");
    }
  }
  if (!any) throw SchemaError("empty mode flag");
  return m;
}

std::string mode_set_label(ModeSet m) {
  const bool bc = m.contains(Mode::Broadcast), mac = m.contains(Mode::MultiAccess);
  if (bc && mac) return "all";
  if (bc) return "bc+sr";
  if (mac) return "mac+sr";
  return "sr";
}

Scenario scenario_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"gains", "epochs", "Bmax", "relays", "modes"}, "scenario");
  Scenario s;
  if (!j.contains("gains") || !j.contains("epochs") || !j.contains("relays")) {
    throw SchemaError("scenario requires gains, epochs, relays");
  }
  const auto& g = j["gains"];
  reject_unknown(g, {"sr1", "sr2", "r1d", "r2d"}, "gains");
  s.gains.sr1 = g.value("sr1", 1.0);
  s.gains.sr2 = g.value("sr2", 1.0);
  s.gains.r1d = g.value("r1d", 1.0);
  s.gains.r2d = g.value("r2d", 1.0);
  s.relay_count = j["relays"].get<int>();
  for (const auto& e : j["epochs"]) {
    reject_unknown(e, {"tau", "Es", "Er1", "Er2"}, "epochs[]");
    s.profile.epoch_durations.push_back(e.at("tau").get<double>());
    s.profile.arrivals_s.push_back(e.value("Es", 0.0));
    s.profile.arrivals_r1.push_back(e.value("Er1", 0.0));
    s.profile.arrivals_r2.push_back(e.value("Er2", 0.0));
  }
  if (j.contains("Bmax")) {
    if (j["Bmax"].is_string()) {
      if (j["Bmax"].get<std::string>() != "inf") {
        throw SchemaError("Bmax must be a number or \"inf\"");
      }
      s.buffer_capacity = kInf;
    } else {
      s.buffer_capacity = j["Bmax"].get<double>();
    }
  }
  if (j.contains("modes")) {
    s.mode_set = mode_set_from_tokens(j["modes"].get<std::vector<std::string>>());
  } else {
    s.mode_set = ModeSet::all();
  }
  return validate_scenario(s);
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["gains"] = {{"sr1", round12(s.gains.sr1)},
                {"sr2", round12(s.gains.sr2)},
                {"r1d", round12(s.gains.r1d)},
                {"r2d", round12(s.gains.r2d)}};
  j["epochs"] = ordered_json::array();
  for (int i = 0; i < s.profile.epoch_count(); ++i) {
    j["epochs"].push_back({{"tau", round12(s.profile.epoch_durations[i])},
                           {"Es", round12(s.profile.arrivals_s[i])},
                           {"Er1", round12(s.profile.arrivals_r1[i])},
                           {"Er2", round12(s.profile.arrivals_r2[i])}});
  }
  if (std::isfinite(s.buffer_capacity)) {
    j["Bmax"] = round12(s.buffer_capacity);
  } else {
    j["Bmax"] = "inf";
  }
  j["relays"] = s.relay_count;
  j["modes"] = mode_set_tokens(s.mode_set);
  return j.dump(2) + "\n";
}

namespace {

ordered_json duals_json(const DualVariables& d) {
  ordered_json j = ordered_json::object();
  auto put = [&](const char* name, const std::vector<double>& v) {
    if (!v.empty()) j[name] = num_array(v);
  };
  put("energy_s", d.energy_s);
  put("energy_r1", d.energy_r1);
  put("energy_r2", d.energy_r2);
  put("data_r1", d.data_r1);
  put("data_r2", d.data_r2);
  put("buffer_r1", d.buffer_r1);
  put("buffer_r2", d.buffer_r2);
  put("half_duplex", d.half_duplex);
  put("mac_r1", d.mac_r1);
  put("mac_r2", d.mac_r2);
  put("mac_sum", d.mac_sum);
  return j;
}

void duals_from_json(const ordered_json& j, DualVariables& d) {
  auto get = [&](const char* name, std::vector<double>& v) {
    if (j.contains(name)) v = to_vec(j[name]);
  };
  get("energy_s", d.energy_s);
  get("energy_r1", d.energy_r1);
  get("energy_r2", d.energy_r2);
  get("data_r1", d.data_r1);
  get("data_r2", d.data_r2);
  get("buffer_r1", d.buffer_r1);
  get("buffer_r2", d.buffer_r2);
  get("half_duplex", d.half_duplex);
  get("mac_r1", d.mac_r1);
  get("mac_r2", d.mac_r2);
  get("mac_sum", d.mac_sum);
}

ordered_json powers_json(const PowerProfile& pp) {
  ordered_json j = ordered_json::object();
  auto put = [&](const char* name, const std::vector<std::optional<double>>& v) {
    if (v.empty()) return;
    ordered_json a = ordered_json::array();
    for (const auto& x : v) {
      if (x.has_value()) {
        a.push_back(round12(*x));
      } else {
        a.push_back(nullptr);
      }
    }
    j[name] = a;
  };
  put("p_s", pp.p_s);
  put("p_r", pp.p_r);
  put("p_b", pp.p_b);
  put("eta", pp.eta);
  put("p_sI", pp.p_sI);
  put("p_sII", pp.p_sII);
  put("p_r1II", pp.p_r1II);
  put("p_r2I", pp.p_r2I);
  put("p_r1m", pp.p_r1m);
  put("p_r2m", pp.p_r2m);
  return j;
}

}  // namespace

std::string solution_to_json(const Solution& sol, const Scenario& s) {
  ordered_json j;
  j["scenario"] = ordered_json::parse(scenario_to_json(s));
  j["status"] = solve_status_name(sol.status);
  j["throughput_nats"] = round12(sol.throughput);
  j["throughput_bits"] = round12(sol.throughput / std::log(2.0));
  ordered_json pol;
  if (const auto* sp = std::get_if<SingleRelayPolicy>(&sol.policy)) {
    pol["l_s"] = num_array(sp->l_s);
    pol["l_r"] = num_array(sp->l_r);
    pol["c_s"] = num_array(sp->c_s);
    pol["c_r"] = num_array(sp->c_r);
  } else {
    const auto& tp = std::get<TwoRelayPolicy>(sol.policy);
    pol["l_b"] = num_array(tp.l_b);
    pol["l_I"] = num_array(tp.l_I);
    pol["l_II"] = num_array(tp.l_II);
    pol["l_m"] = num_array(tp.l_m);
    pol["c_br1"] = num_array(tp.c_br1);
    pol["c_br2"] = num_array(tp.c_br2);
    pol["c_sI"] = num_array(tp.c_sI);
    pol["c_sII"] = num_array(tp.c_sII);
    pol["c_r1II"] = num_array(tp.c_r1II);
    pol["c_r2I"] = num_array(tp.c_r2I);
    pol["c_r1m"] = num_array(tp.c_r1m);
    pol["c_r2m"] = num_array(tp.c_r2m);
    pol["e_r1m"] = num_array(tp.e_r1m);
    pol["e_r2m"] = num_array(tp.e_r2m);
  }
  j["policy"] = pol;
  j["powers"] = powers_json(recover_powers(sol, s));
  j["duals"] = duals_json(sol.duals);
  j["diagnostics"] = {{"newton_iterations", sol.diagnostics.newton_iterations},
                      {"kkt_residual", round12(sol.diagnostics.kkt_residual)},
                      {"duality_gap_bound", round12(sol.diagnostics.duality_gap_bound)},
                      {"barrier_path", num_array(sol.diagnostics.barrier_path)}};
  return j.dump(2) + "\n";
}

LoadedSolution solution_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  LoadedSolution out;
  out.scenario = scenario_from_json(j.at("scenario").dump());
  Solution& sol = out.solution;
  const std::string st = j.at("status").get<std::string>();
  sol.status = st == "certified" ? SolveStatus::Certified
               : st == "degenerate" ? SolveStatus::Degenerate
                                    : SolveStatus::Stalled;
  sol.throughput = j.at("throughput_nats").get<double>();
  const auto& pol = j.at("policy");
  if (out.scenario.relay_count == 1) {
    SingleRelayPolicy p;
    p.l_s = to_vec(pol.at("l_s"));
    p.l_r = to_vec(pol.at("l_r"));
    p.c_s = to_vec(pol.at("c_s"));
    p.c_r = to_vec(pol.at("c_r"));
    sol.policy = p;
  } else {
    TwoRelayPolicy p;
    p.l_b = to_vec(pol.at("l_b"));
    p.l_I = to_vec(pol.at("l_I"));
    p.l_II = to_vec(pol.at("l_II"));
    p.l_m = to_vec(pol.at("l_m"));
    p.c_br1 = to_vec(pol.at("c_br1"));
    p.c_br2 = to_vec(pol.at("c_br2"));
    p.c_sI = to_vec(pol.at("c_sI"));
    p.c_sII = to_vec(pol.at("c_sII"));
    p.c_r1II = to_vec(pol.at("c_r1II"));
    p.c_r2I = to_vec(pol.at("c_r2I"));
    p.c_r1m = to_vec(pol.at("c_r1m"));
    p.c_r2m = to_vec(pol.at("c_r2m"));
    p.e_r1m = to_vec(pol.at("e_r1m"));
    p.e_r2m = to_vec(pol.at("e_r2m"));
    sol.policy = p;
  }
  if (j.contains("duals")) duals_from_json(j["duals"], sol.duals);
  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    sol.diagnostics.newton_iterations = d.value("newton_iterations", 0);
    sol.diagnostics.kkt_residual = d.value("kkt_residual", 0.0);
    sol.diagnostics.duality_gap_bound = d.value("duality_gap_bound", 0.0);
    if (d.contains("barrier_path")) sol.diagnostics.barrier_path = to_vec(d["barrier_path"]);
  }
  return out;
}

bool VerifyOutcome::pass() const {
  return objective_consistent && properties.pass() && kkt.max_relative_deviation <= 1e-4 &&
         schedule_ok;
}

VerifyOutcome verify_solution(const Solution& sol, const Scenario& s, const Tolerances& tol) {
  VerifyOutcome out;
  const double recomputed = policy_throughput(sol.policy);
  out.objective_error = std::abs(recomputed - sol.throughput) / std::max(1.0, recomputed);
  out.objective_consistent = out.objective_error <= 1e-10;
  out.feasibility_violation = policy_feasibility_violation(sol.policy, s);
  const auto flags = classify_states(sol, s, tol);
  out.properties = check_structural_properties(sol, s, flags, tol);
  out.kkt = kkt_residuals(sol, s, tol);
  try {
    const auto sch = build_schedule(sol.policy, s);
    const auto tr = simulate_schedule(sch, s, s.profile.deadline() / 64.0);
    const auto rep = verify_traces(tr, s, tol.schedule, recomputed);
    out.schedule_ok = rep.pass();
    out.delivered_error = std::abs(rep.delivered - recomputed);
    out.dummy_nats = sch.dummy_total;
    if (!rep.pass()) {
      out.schedule_error = rep.violations.front().what + " at t=" +
                           fmt12(rep.violations.front().time);
    }
  } catch (const Unschedulable& e) {
    out.schedule_ok = false;
    out.schedule_error = std::string("unschedulable: ") + e.what();
  }
  return out;
}

std::string verify_outcome_to_json(const VerifyOutcome& v) {
  ordered_json j;
  j["pass"] = v.pass();
  j["objective_consistent"] = v.objective_consistent;
  j["objective_error"] = round12(v.objective_error);
  j["feasibility_violation"] = round12(v.feasibility_violation);
  ordered_json lemmas = ordered_json::array();
  for (const auto& l : v.properties.lemmas) {
    ordered_json lj;
    lj["lemma"] = l.lemma;
    lj["applicable"] = l.applicable;
    lj["pass"] = l.pass();
    lj["degenerate_ambiguous"] = l.degenerate_ambiguous;
    ordered_json viols = ordered_json::array();
    for (const auto& x : l.violations) {
      viols.push_back({{"epoch", x.epoch},
                       {"observed_jump", round12(x.observed_jump)},
                       {"missing", x.missing_flags}});
    }
    lj["violations"] = viols;
    lemmas.push_back(lj);
  }
  j["lemmas"] = lemmas;
  j["kkt"] = {{"max_relative_deviation", round12(v.kkt.max_relative_deviation)},
              {"compared", v.kkt.compared},
              {"excluded", v.kkt.excluded}};
  j["schedule"] = {{"ok", v.schedule_ok},
                   {"delivered_error", round12(v.delivered_error)},
                   {"dummy_nats", round12(v.dummy_nats)},
                   {"error", v.schedule_error}};
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace relay_harvest
