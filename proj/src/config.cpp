#include "opt3d1d/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "opt3d1d/types.hpp"

namespace opt3d1d {

namespace pt = boost::property_tree;

const char *to_string(SolverKind kind) {
  switch (kind) {
  case SolverKind::opt_pcg: return "opt_pcg";
  case SolverKind::opt_direct: return "opt_direct";
  case SolverKind::coupled: return "coupled";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string &name) {
  if (name == "opt_pcg") return SolverKind::opt_pcg;
  if (name == "opt_direct") return SolverKind::opt_direct;
  if (name == "coupled") return SolverKind::coupled;
  throw ConfigError("unknown solver '" + name + "' (expected opt_pcg, opt_direct or coupled)");
}

namespace {

template <typename T> T parse_value(const std::string &text, const std::string &key) {
  std::istringstream in(text);
  T value{};
  std::string rest;
  if (!(in >> value) || (in >> rest)) throw ConfigError("invalid value '" + text + "' for " + key);
  return value;
}

bool parse_bool(const std::string &text, const std::string &key) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

template <typename T> std::vector<T> parse_list(const std::string &text, const char *what) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(std::string("empty entry in ") + what + " list '" + text + "'");
    out.push_back(parse_value<T>(item.substr(b, e - b + 1), what));
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

} // namespace

std::vector<int> parse_int_list(const std::string &text) { return parse_list<int>(text, "integer"); }
std::vector<double> parse_double_list(const std::string &text) { return parse_list<double>(text, "number"); }

RunConfig parse_config(const std::string &text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig c;
  using Setter = std::function<void(const std::string &, const std::string &)>;
  const std::map<std::string, std::map<std::string, Setter>> keys{
      {"problem",
       {{"name", [&](auto &v, auto &) { c.problem = v; }},
        {"mesh_file", [&](auto &v, auto &) { c.mesh_file = v; }},
        {"network_file", [&](auto &v, auto &) { c.network_file = v; }},
        {"seed", [&](auto &v, auto &k) { c.seed = parse_value<std::uint64_t>(v, k); }},
        {"segments", [&](auto &v, auto &k) { c.segments = parse_value<int>(v, k); }},
        {"conductivity", [&](auto &v, auto &k) { c.custom.conductivity = parse_value<double>(v, k); }},
        {"source", [&](auto &v, auto &k) { c.custom.source = parse_value<double>(v, k); }},
        {"boundary", [&](auto &v, auto &) { c.custom.boundary = v; }}}},
      {"mesh", {{"n", [&](auto &v, auto &) { c.n = parse_int_list(v); }}}},
      {"partition",
       {{"delta_uhat", [&](auto &v, auto &k) { c.deltas.uhat = parse_value<double>(v, k); }},
        {"delta_d", [&](auto &v, auto &k) { c.deltas.psi_d = parse_value<double>(v, k); }},
        {"delta_sigma", [&](auto &v, auto &k) { c.deltas.psi_sigma = parse_value<double>(v, k); }}}},
      {"solver",
       {{"kind", [&](auto &v, auto &) { c.solver = solver_kind_from_string(v); }},
        {"tol", [&](auto &v, auto &k) { c.tol = parse_value<double>(v, k); }},
        {"max_iter", [&](auto &v, auto &k) { c.max_iter = parse_value<int>(v, k); }},
        {"preconditioner", [&](auto &v, auto &k) { c.preconditioner = parse_bool(v, k); }}}},
      {"output",
       {{"dir", [&](auto &v, auto &) { c.output_dir = v; }},
        {"dump_matrices", [&](auto &v, auto &k) { c.dump_matrices = parse_bool(v, k); }}}},
      {"sweep",
       {{"delta_uhat", [&](auto &v, auto &) { c.sweep_uhat = parse_double_list(v); }},
        {"delta_d", [&](auto &v, auto &) { c.sweep_d = parse_double_list(v); }},
        {"delta_sigma", [&](auto &v, auto &) { c.sweep_sigma = parse_double_list(v); }}}},
  };

  for (const auto &[section, entries] : tree) {
    const auto sec = keys.find(section);
    if (sec == keys.end()) throw ConfigError("unknown config section [" + section + "]");
    if (!entries.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto &[key, node] : entries) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      it->second(node.data(), section + "." + key);
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig &c) {
  if (c.problem.empty() && (c.mesh_file.empty() || c.network_file.empty()))
    throw ConfigError("either a problem name or both mesh_file and network_file are required");
  if (c.n.empty()) throw ConfigError("mesh.n must list at least one subdivision count");
  for (int n : c.n)
    if (n < 1) throw ConfigError("mesh.n entries must be >= 1");
  for (double d : {c.deltas.uhat, c.deltas.psi_d, c.deltas.psi_sigma})
    if (!(d > 0.0)) throw ConfigError("partition deltas must be positive");
  for (const auto *axis : {&c.sweep_uhat, &c.sweep_d, &c.sweep_sigma})
    for (double d : *axis)
      if (!(d > 0.0)) throw ConfigError("sweep deltas must be positive");
  if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("solver.tol must lie in (0, 1)");
  if (c.max_iter < -1 || c.max_iter == 0) throw ConfigError("solver.max_iter must be positive (or -1 for default)");
  if (!(c.custom.conductivity > 0.0)) throw ConfigError("problem.conductivity must be positive");
  const auto &b = c.custom.boundary;
  if (b.rfind("dirichlet:", 0) != 0 && b.rfind("neumann:", 0) != 0)
    throw ConfigError("problem.boundary must be dirichlet:<value> or neumann:<flux>");
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

} // namespace opt3d1d
