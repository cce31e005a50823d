#include "vortexlab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vortexlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorCode::ConfigError, "not a real number: '" + t + "'");
  return v;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw Error(ErrorCode::ConfigError, "not an integer: '" + t + "'");
  return v;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ' && c != '\t') t += c;
  if (t.empty()) throw Error(ErrorCode::ConfigError, "empty complex number");
  if (t.back() != 'i') return parse_real(t);
  t.pop_back();
  // Split "a+b" / "a-b" at the last sign that is not an exponent sign or the leading sign.
  std::size_t cut = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;)
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      cut = k;
      break;
    }
  const std::string re = cut == std::string::npos ? "" : t.substr(0, cut);
  std::string im = cut == std::string::npos ? t : t.substr(cut);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  if (im[0] == '+') im = im.substr(1);
  return {re.empty() ? 0.0 : parse_real(re), parse_real(im)};
}

CMat parse_matrix(const std::string& text) {
  const auto rows = split(text, ';');
  if (rows.empty()) throw Error(ErrorCode::ConfigError, "empty matrix");
  std::vector<std::vector<cplx>> entries;
  for (const auto& row : rows) {
    std::vector<cplx> r;
    for (const auto& e : split(row, ',')) r.push_back(parse_complex(e));
    if (!entries.empty() && r.size() != entries.front().size())
      throw Error(ErrorCode::ConfigError, "matrix rows have different lengths");
    entries.push_back(std::move(r));
  }
  CMat m(Eigen::Index(entries.size()), Eigen::Index(entries.front().size()));
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries[i].size(); ++j) m(Eigen::Index(i), Eigen::Index(j)) = entries[i][j];
  return m;
}

CVec parse_vector(const std::string& text) {
  const auto items = split(text, ',');
  CVec v(Eigen::Index(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v(Eigen::Index(i)) = parse_complex(items[i]);
  return v;
}

TorusPtr ExperimentConfig::torus() const {
  const Eigen::MatrixXd metric = g.size() ? g : Eigen::MatrixXd::Identity(n, n);
  return make_torus(n, metric, N, nu);
}

FlatBundle ExperimentConfig::bundle() const {
  if (!monodromies.empty()) {
    if (int(monodromies.size()) != n)
      throw Error(ErrorCode::ConfigError, "expected " + std::to_string(n) + " monodromies, got " +
                                              std::to_string(monodromies.size()));
    return make_flat_bundle(monodromies);
  }
  int r = rank;
  if (r == 0) r = phi ? int(phi->size()) : 1;
  return trivial_bundle(n, r);
}

FlatPair ExperimentConfig::pair() const {
  if (!phi) throw Error(ErrorCode::ConfigError, "[bundle] phi is required for this command");
  return make_flat_pair(bundle(), *phi);
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, std::map<std::string, Setter>> table = {
      {"manifold",
       {{"n", [&](const std::string& v) { cfg.n = parse_int(v); }},
        {"g", [&](const std::string& v) { cfg.g = parse_matrix(v).real(); }},
        {"N", [&](const std::string& v) { cfg.N = parse_int(v); }},
        {"nu", [&](const std::string& v) { cfg.nu = parse_real(v); }}}},
      {"bundle",
       {{"rank", [&](const std::string& v) { cfg.rank = parse_int(v); }},
        {"monodromy1", [&](const std::string& v) { cfg.monodromies.resize(std::max<std::size_t>(cfg.monodromies.size(), 1)); cfg.monodromies[0] = parse_matrix(v); }},
        {"monodromy2", [&](const std::string& v) { cfg.monodromies.resize(2); cfg.monodromies[1] = parse_matrix(v); }},
        {"phi", [&](const std::string& v) { cfg.phi = parse_vector(v); }}}},
      {"run",
       {{"command", [&](const std::string& v) { cfg.command = v; }},
        {"tau", [&](const std::string& v) { cfg.tau = parse_real(v); }},
        {"dt", [&](const std::string& v) { cfg.solver.dt = parse_real(v); }},
        {"max_iters", [&](const std::string& v) { cfg.solver.max_iters = parse_int(v); }},
        {"tol", [&](const std::string& v) { cfg.solver.tol = parse_real(v); }},
        {"stall_window", [&](const std::string& v) { cfg.solver.stall_window = parse_int(v); }},
        {"checkpoint_every", [&](const std::string& v) { cfg.solver.checkpoint_every = parse_int(v); }},
        {"init_scale", [&](const std::string& v) { cfg.solver.init_scale = parse_real(v); }},
        {"warm_start", [&](const std::string& v) { cfg.warm_start = v; }},
        {"sigma", [&](const std::string& v) { cfg.sigma = parse_real(v); }},
        {"alpha_scale", [&](const std::string& v) { cfg.alpha_scale = parse_complex(v); }},
        {"fs_scale", [&](const std::string& v) { cfg.fs_scale = parse_real(v); }},
        {"p1_degree", [&](const std::string& v) { cfg.p1_degree = parse_int(v); }},
        {"perturbation", [&](const std::string& v) { cfg.perturbation = parse_real(v); }},
        {"seed", [&](const std::string& v) { cfg.seed = std::uint64_t(parse_int(v)); }}}},
      {"output",
       {{"dir", [&](const std::string& v) { cfg.out_dir = v; }},
        {"format", [&](const std::string& v) { cfg.format = v; }},
        {"prefix", [&](const std::string& v) { cfg.prefix = v; }}}},
  };

  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto where = [&] { return source + ":" + std::to_string(number) + ": "; };
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ConfigError, where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!table.count(section)) throw Error(ErrorCode::ConfigError, where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, where() + "expected key = value");
    if (section.empty()) throw Error(ErrorCode::ConfigError, where() + "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw Error(ErrorCode::ConfigError, where() + "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(value);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, where() + "key '" + key + "': " + e.what());
    }
  }
  if (cfg.format != "json" && cfg.format != "csv")
    throw Error(ErrorCode::ConfigError, source + ": format must be json or csv");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
  return parse_config(in, path);
}

}  // namespace vortexlab
