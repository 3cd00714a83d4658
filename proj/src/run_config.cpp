#include "fracctl/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "fracctl/errors.hpp"
#include "fracctl/report_io.hpp"

namespace fracctl {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& context,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw config_error(context + " must be a JSON object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (item.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw config_error("unknown key '" + item.key() + "' in " + context);
    }
  }
}

const json& require(const json& obj, const std::string& context,
                    const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end()) {
    throw config_error("missing key '" + std::string(name) + "' in " + context);
  }
  return *it;
}

double as_number(const json& v, const std::string& context) {
  if (!v.is_number()) throw config_error(context + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& context) {
  if (!v.is_number_integer()) throw config_error(context + " must be an integer");
  return v.get<int>();
}

Eigen::VectorXd as_vector(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty()) {
    throw config_error(context + " must be a nonempty array of numbers");
  }
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = as_number(v[i], context + " entry");
  }
  return out;
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& context) {
  if (!v.is_array() || v.empty() || !v[0].is_array()) {
    throw config_error(context + " must be an array of equal-length rows");
  }
  const std::size_t rows = v.size();
  const std::size_t cols = v[0].size();
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) {
      throw config_error(context + " rows must have equal length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(v[i][j], context + " entry");
    }
  }
  return out;
}

DistributionSpec parse_spec(const json& obj, const std::string& kind) {
  if (kind == "gaussian") {
    check_keys(obj, "system.ensemble.spec",
               {"A0", "B0", "mean", "variance", "entries"});
  } else {
    check_keys(obj, "system.ensemble.spec", {"A0", "B0", "lo", "hi", "entries"});
  }
  DistributionSpec spec;
  spec.A0 = as_matrix(require(obj, "spec", "A0"), "spec.A0");
  spec.B0 = as_matrix(require(obj, "spec", "B0"), "spec.B0");
  if (kind == "gaussian") {
    spec.law = ScalarLaw::gaussian(
        as_number(require(obj, "spec", "mean"), "spec.mean"),
        as_number(require(obj, "spec", "variance"), "spec.variance"));
  } else {
    spec.law =
        ScalarLaw::uniform(as_number(require(obj, "spec", "lo"), "spec.lo"),
                           as_number(require(obj, "spec", "hi"), "spec.hi"));
  }
  const json& entries = require(obj, "spec", "entries");
  if (!entries.is_array() || entries.empty()) {
    throw config_error("spec.entries must be a nonempty array");
  }
  for (const auto& item : entries) {
    check_keys(item, "spec.entries", {"matrix", "row", "col"});
    EntryRef ref;
    const std::string which =
        require(item, "spec.entries", "matrix").get<std::string>();
    if (which != "A" && which != "B") {
      throw config_error("spec.entries matrix must be \"A\" or \"B\"");
    }
    ref.matrix = which[0];
    ref.row = as_int(require(item, "spec.entries", "row"), "entries.row");
    ref.col = as_int(require(item, "spec.entries", "col"), "entries.col");
    spec.entries.push_back(ref);
  }
  spec.validate();
  return spec;
}

EnsembleConfig parse_ensemble(const json& obj) {
  check_keys(obj, "system.ensemble", {"kind", "members", "spec", "M", "seed"});
  EnsembleConfig cfg;
  cfg.kind = require(obj, "system.ensemble", "kind").get<std::string>();
  if (cfg.kind != "discrete" && cfg.kind != "gaussian" &&
      cfg.kind != "uniform") {
    throw config_error("system.ensemble.kind must be discrete, gaussian or "
                       "uniform, got '" + cfg.kind + "'");
  }
  if (obj.contains("seed")) {
    const json& seed = obj["seed"];
    if (!seed.is_number_unsigned()) {
      throw config_error("system.ensemble.seed must be a nonnegative integer");
    }
    cfg.seed = seed.get<std::uint64_t>();
  }
  if (cfg.kind == "discrete") {
    if (obj.contains("spec")) {
      throw config_error("system.ensemble.spec is only valid for sampled kinds");
    }
    const json& members = require(obj, "system.ensemble", "members");
    if (!members.is_array() || members.empty()) {
      throw config_error("system.ensemble.members must be a nonempty array");
    }
    for (const auto& item : members) {
      check_keys(item, "ensemble.members", {"A", "B", "weight", "x0"});
      DiscreteMemberConfig member;
      member.A = as_matrix(require(item, "member", "A"), "member.A");
      member.B = as_matrix(require(item, "member", "B"), "member.B");
      member.weight =
          as_number(require(item, "member", "weight"), "member.weight");
      if (item.contains("x0")) {
        member.x0 = as_vector(item["x0"], "member.x0");
      }
      cfg.members.push_back(std::move(member));
    }
    cfg.M = static_cast<int>(cfg.members.size());
    if (obj.contains("M") &&
        as_int(obj["M"], "system.ensemble.M") != cfg.M) {
      throw config_error("system.ensemble.M disagrees with the member count");
    }
  } else {
    if (obj.contains("members")) {
      throw config_error("system.ensemble.members is only valid for discrete");
    }
    cfg.spec = parse_spec(require(obj, "system.ensemble", "spec"), cfg.kind);
    cfg.M = as_int(require(obj, "system.ensemble", "M"), "system.ensemble.M");
    if (cfg.M < 1) throw config_error("system.ensemble.M must be >= 1");
  }
  return cfg;
}

}  // namespace

bool DiscreteMemberConfig::operator==(const DiscreteMemberConfig& o) const {
  return A == o.A && B == o.B && weight == o.weight &&
         x0.has_value() == o.x0.has_value() &&
         (!x0.has_value() || *x0 == *o.x0);
}

bool EnsembleConfig::operator==(const EnsembleConfig& o) const {
  if (kind != o.kind || members.size() != o.members.size() || M != o.M ||
      seed != o.seed || spec.has_value() != o.spec.has_value()) {
    return false;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!(members[i] == o.members[i])) return false;
  }
  if (spec.has_value()) {
    if (spec->A0 != o.spec->A0 || spec->B0 != o.spec->B0 ||
        spec->entries.size() != o.spec->entries.size()) {
      return false;
    }
    const ScalarLaw& a = spec->law;
    const ScalarLaw& b = o.spec->law;
    if (a.kind != b.kind || a.mean != b.mean || a.variance != b.variance ||
        a.lo != b.lo || a.hi != b.hi || a.values != b.values ||
        a.probs != b.probs) {
      return false;
    }
    for (std::size_t i = 0; i < spec->entries.size(); ++i) {
      if (spec->entries[i].matrix != o.spec->entries[i].matrix ||
          spec->entries[i].row != o.spec->entries[i].row ||
          spec->entries[i].col != o.spec->entries[i].col) {
        return false;
      }
    }
  }
  return true;
}

bool ControlSectionConfig::operator==(const ControlSectionConfig& o) const {
  return target == o.target && cg_tol == o.cg_tol &&
         cg_max_iter == o.cg_max_iter;
}

bool RunConfig::operator==(const RunConfig& o) const {
  const auto system_eq = [&] {
    if (deterministic.has_value() != o.deterministic.has_value()) return false;
    if (deterministic.has_value() &&
        (deterministic->A != o.deterministic->A ||
         deterministic->B != o.deterministic->B)) {
      return false;
    }
    if (ensemble.has_value() != o.ensemble.has_value()) return false;
    return !ensemble.has_value() || *ensemble == *o.ensemble;
  };
  return order == o.order && system_eq() &&
         initial_state == o.initial_state &&
         shared_initial_state == o.shared_initial_state &&
         grid_N == o.grid_N && quadrature_Nq == o.quadrature_Nq &&
         control.has_value() == o.control.has_value() &&
         (!control.has_value() || *control == *o.control) &&
         output == o.output;
}

namespace {

RunConfig parse_checked(const json& root) {
  if (!root.is_object()) throw config_error("config root must be an object");
  check_keys(root, "config root",
             {"order", "system", "initial_state", "grid", "quadrature",
              "control", "output"});

  RunConfig cfg;
  if (root.contains("order")) {
    const json& order = root["order"];
    check_keys(order, "order", {"alpha", "T"});
    OrderConfig oc;
    oc.alpha = as_number(require(order, "order", "alpha"), "order.alpha");
    oc.T = as_number(require(order, "order", "T"), "order.T");
    if (!(oc.alpha > 0.0 && oc.alpha <= 1.0)) {
      throw config_error("order.alpha must lie in (0, 1]");
    }
    if (!(oc.T > 0.0)) throw config_error("order.T must be positive");
    cfg.order = oc;
  }

  const json& system = require(root, "config root", "system");
  check_keys(system, "system", {"deterministic", "ensemble"});
  if (system.contains("deterministic") == system.contains("ensemble")) {
    throw config_error(
        "system must hold exactly one of 'deterministic' or 'ensemble'");
  }
  if (system.contains("deterministic")) {
    const json& det = system["deterministic"];
    check_keys(det, "system.deterministic", {"A", "B"});
    SystemRealization sys;
    sys.A = as_matrix(require(det, "system.deterministic", "A"),
                      "deterministic.A");
    sys.B = as_matrix(require(det, "system.deterministic", "B"),
                      "deterministic.B");
    sys.validate();
    cfg.deterministic = std::move(sys);
  } else {
    cfg.ensemble = parse_ensemble(system["ensemble"]);
  }

  if (root.contains("initial_state")) {
    const json& x0 = root["initial_state"];
    if (!x0.is_array() || x0.empty()) {
      throw config_error("initial_state must be a nonempty array");
    }
    if (x0[0].is_array()) {
      cfg.shared_initial_state = false;
      for (const auto& row : x0) {
        cfg.initial_state.push_back(as_vector(row, "initial_state row"));
      }
    } else {
      cfg.shared_initial_state = true;
      cfg.initial_state.push_back(as_vector(x0, "initial_state"));
    }
  }

  if (root.contains("grid")) {
    const json& grid = root["grid"];
    check_keys(grid, "grid", {"N"});
    const int N = as_int(require(grid, "grid", "N"), "grid.N");
    if (N < 1) throw config_error("grid.N must be >= 1");
    cfg.grid_N = N;
  }
  if (root.contains("quadrature")) {
    const json& quad = root["quadrature"];
    check_keys(quad, "quadrature", {"Nq"});
    const int Nq = as_int(require(quad, "quadrature", "Nq"), "quadrature.Nq");
    if (Nq < 1) throw config_error("quadrature.Nq must be >= 1");
    cfg.quadrature_Nq = Nq;
  }
  if (root.contains("control")) {
    const json& control = root["control"];
    check_keys(control, "control", {"target", "cg_tol", "cg_max_iter"});
    ControlSectionConfig cc;
    cc.target = as_vector(require(control, "control", "target"),
                          "control.target");
    if (control.contains("cg_tol")) {
      cc.cg_tol = as_number(control["cg_tol"], "control.cg_tol");
      if (!(cc.cg_tol > 0.0)) throw config_error("control.cg_tol must be > 0");
    }
    if (control.contains("cg_max_iter")) {
      cc.cg_max_iter = as_int(control["cg_max_iter"], "control.cg_max_iter");
      if (cc.cg_max_iter < 1) {
        throw config_error("control.cg_max_iter must be >= 1");
      }
    }
    cfg.control = std::move(cc);
  }
  if (root.contains("output")) {
    const json& output = root["output"];
    check_keys(output, "output", {"dir", "formats"});
    if (output.contains("dir")) {
      cfg.output.dir = output["dir"].get<std::string>();
    }
    if (output.contains("formats")) {
      cfg.output.formats.clear();
      for (const auto& fmt : output["formats"]) {
        const std::string name = fmt.get<std::string>();
        if (name != "csv" && name != "json") {
          throw config_error("output.formats entries must be csv or json");
        }
        cfg.output.formats.push_back(name);
      }
    }
  }
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw config_error(std::string("invalid JSON: ") + err.what());
  }
  try {
    return parse_checked(root);
  } catch (const json::exception& err) {
    // Wrong value types surface as library exceptions; fold them into the
    // configuration error channel.
    throw config_error(std::string("invalid config value: ") + err.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
  JsonWriter w;
  w.begin_object();
  if (cfg.order.has_value()) {
    w.key("order").begin_object();
    w.key("alpha").value(cfg.order->alpha);
    w.key("T").value(cfg.order->T);
    w.end_object();
  }
  w.key("system").begin_object();
  if (cfg.deterministic.has_value()) {
    w.key("deterministic").begin_object();
    w.key("A");
    write_matrix(w, cfg.deterministic->A);
    w.key("B");
    write_matrix(w, cfg.deterministic->B);
    w.end_object();
  } else if (cfg.ensemble.has_value()) {
    const EnsembleConfig& e = *cfg.ensemble;
    w.key("ensemble").begin_object();
    w.key("kind").value(std::string_view(e.kind));
    if (e.kind == "discrete") {
      w.key("members").begin_array();
      for (const auto& member : e.members) {
        w.begin_object();
        w.key("A");
        write_matrix(w, member.A);
        w.key("B");
        write_matrix(w, member.B);
        w.key("weight").value(member.weight);
        if (member.x0.has_value()) {
          w.key("x0");
          write_vector(w, *member.x0);
        }
        w.end_object();
      }
      w.end_array();
    } else {
      const DistributionSpec& spec = *e.spec;
      w.key("spec").begin_object();
      w.key("A0");
      write_matrix(w, spec.A0);
      w.key("B0");
      write_matrix(w, spec.B0);
      if (e.kind == "gaussian") {
        w.key("mean").value(spec.law.mean);
        w.key("variance").value(spec.law.variance);
      } else {
        w.key("lo").value(spec.law.lo);
        w.key("hi").value(spec.law.hi);
      }
      w.key("entries").begin_array();
      for (const auto& entry : spec.entries) {
        w.begin_object();
        w.key("matrix").value(entry.matrix == 'A' ? std::string_view("A")
                                                  : std::string_view("B"));
        w.key("row").value(entry.row);
        w.key("col").value(entry.col);
        w.end_object();
      }
      w.end_array();
      w.end_object();
      w.key("M").value(e.M);
    }
    w.key("seed").value(static_cast<std::uint64_t>(e.seed));
    w.end_object();
  }
  w.end_object();
  if (!cfg.initial_state.empty()) {
    w.key("initial_state");
    if (cfg.shared_initial_state) {
      write_vector(w, cfg.initial_state.front());
    } else {
      w.begin_array();
      for (const auto& x0 : cfg.initial_state) write_vector(w, x0);
      w.end_array();
    }
  }
  if (cfg.grid_N.has_value()) {
    w.key("grid").begin_object();
    w.key("N").value(*cfg.grid_N);
    w.end_object();
  }
  if (cfg.quadrature_Nq.has_value()) {
    w.key("quadrature").begin_object();
    w.key("Nq").value(*cfg.quadrature_Nq);
    w.end_object();
  }
  if (cfg.control.has_value()) {
    w.key("control").begin_object();
    w.key("target");
    write_vector(w, cfg.control->target);
    w.key("cg_tol").value(cfg.control->cg_tol);
    w.key("cg_max_iter").value(cfg.control->cg_max_iter);
    w.end_object();
  }
  w.key("output").begin_object();
  w.key("dir").value(std::string_view(cfg.output.dir));
  w.key("formats").begin_array();
  for (const auto& fmt : cfg.output.formats) w.value(std::string_view(fmt));
  w.end_array();
  w.end_object();
  w.end_object();
  return w.str();
}

ParameterEnsemble build_ensemble_from_config(const RunConfig& cfg) {
  const auto shared_x0 = [&](Eigen::Index n) -> Eigen::VectorXd {
    if (cfg.initial_state.empty()) {
      throw config_error("initial_state is required for this system");
    }
    if (!cfg.shared_initial_state) {
      throw config_error("per-member initial_state needs one row per member");
    }
    if (cfg.initial_state.front().size() != n) {
      throw config_error("initial_state dimension disagrees with the system");
    }
    return cfg.initial_state.front();
  };

  if (cfg.deterministic.has_value()) {
    EnsembleMember member;
    member.system = *cfg.deterministic;
    member.weight = 1.0;
    member.x0 = shared_x0(cfg.deterministic->n());
    return discrete_ensemble({std::move(member)});
  }
  if (!cfg.ensemble.has_value()) {
    throw config_error("config has no system section");
  }
  const EnsembleConfig& ec = *cfg.ensemble;
  if (ec.kind == "discrete") {
    std::vector<EnsembleMember> members;
    members.reserve(ec.members.size());
    for (std::size_t i = 0; i < ec.members.size(); ++i) {
      const DiscreteMemberConfig& mc = ec.members[i];
      EnsembleMember member;
      member.system.A = mc.A;
      member.system.B = mc.B;
      member.weight = mc.weight;
      if (mc.x0.has_value()) {
        if (!cfg.initial_state.empty()) {
          throw config_error(
              "initial_state conflicts with per-member x0 in members");
        }
        member.x0 = *mc.x0;
      } else if (!cfg.shared_initial_state) {
        if (cfg.initial_state.size() != ec.members.size()) {
          throw config_error("per-member initial_state needs one row per member");
        }
        member.x0 = cfg.initial_state[i];
      } else {
        member.x0 = shared_x0(mc.A.rows());
      }
      members.push_back(std::move(member));
    }
    return discrete_ensemble(std::move(members));
  }
  const Eigen::Index n = ec.spec->A0.rows();
  if (!cfg.shared_initial_state) {
    if (static_cast<int>(cfg.initial_state.size()) != ec.M) {
      throw config_error("per-member initial_state needs one row per sample");
    }
    ParameterEnsemble e = sample_ensemble(*ec.spec, ec.M, ec.seed,
                                          Eigen::VectorXd::Zero(n));
    for (int i = 0; i < ec.M; ++i) {
      if (cfg.initial_state[i].size() != n) {
        throw config_error("initial_state dimension disagrees with the system");
      }
      e.members[i].x0 = cfg.initial_state[i];
    }
    return e;
  }
  return sample_ensemble(*ec.spec, ec.M, ec.seed, shared_x0(n));
}

std::optional<std::vector<double>> config_sampled_values(
    const RunConfig& cfg, const ParameterEnsemble& e) {
  if (!cfg.ensemble.has_value() || !cfg.ensemble->spec.has_value()) {
    return std::nullopt;
  }
  return sampled_values(e, *cfg.ensemble->spec);
}

}  // namespace fracctl
