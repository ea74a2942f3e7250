#include "polx/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <sstream>
#include <variant>

#include "polx/output.hpp"

namespace polx {
namespace {

using Target = std::variant<double*, int*, std::string*, std::vector<double>*, std::uint64_t*>;

struct Entry {
  std::string section, key;
  Target target;
};

std::vector<Entry> registry(RunConfig& c) {
  return {
      {"medium", "model", &c.medium.model},
      {"medium", "alpha", &c.medium.alpha},
      {"medium", "gamma", &c.medium.gamma},
      {"medium", "gamma_j", &c.medium.gamma_j},
      {"medium", "k", &c.medium.k},
      {"medium", "ell_z", &c.medium.ell_z},
      {"medium", "table", &c.medium.table},
      {"source", "kind", &c.source.kind},
      {"source", "gamma_j", &c.source.gamma_j},
      {"source", "width_minor", &c.source.width_minor},
      {"source", "width_major", &c.source.width_major},
      {"source", "rotation", &c.source.rotation},
      {"source", "jx", &c.source.jx},
      {"source", "jy", &c.source.jy},
      {"source", "jz", &c.source.jz},
      {"grid", "layout", &c.grid.layout},
      {"grid", "n_radial", &c.grid.n_radial},
      {"grid", "n_angular", &c.grid.n_angular},
      {"grid", "kappa_max", &c.grid.kappa_max},
      {"grid", "spacing", &c.grid.spacing},
      {"kernel", "n_phi", &c.kernel.n_phi},
      {"kernel", "n_window", &c.kernel.n_window},
      {"kernel", "n_middle", &c.kernel.n_middle},
      {"kernel", "n_outer", &c.kernel.n_outer},
      {"kernel", "radius", &c.kernel.radius},
      {"evolve", "z_end", &c.evolve.z_end},
      {"evolve", "z_units", &c.evolve.z_units},
      {"evolve", "dz", &c.evolve.dz},
      {"evolve", "snapshots", &c.evolve.snapshots},
      {"evolve", "cutoff_sigma", &c.evolve.cutoff_sigma},
      {"evolve", "record_every", &c.evolve.record_every},
      {"mfp", "n_points", &c.mfp.n_points},
      {"mfp", "kappa_max", &c.mfp.kappa_max},
      {"hf", "gammas", &c.hf.gammas},
      {"hf", "kappa", &c.hf.kappa},
      {"hf", "lattice_radius", &c.hf.lattice_radius},
      {"hf", "kbar_j", &c.hf.kbar_j},
      {"hf", "z_end", &c.hf.z_end},
      {"hf", "n_steps", &c.hf.n_steps},
      {"rt", "kappas", &c.rt.kappas},
      {"rt", "tolerance", &c.rt.tolerance},
      {"field", "points", &c.field.points},
      {"field", "n_radial", &c.field.n_radial},
      {"field", "n_angular", &c.field.n_angular},
      {"field", "kappa_max", &c.field.kappa_max},
      {"mc", "epsilon", &c.mc.epsilon},
      {"mc", "n_realizations", &c.mc.n_realizations},
      {"mc", "box", &c.mc.box},
      {"mc", "lattice_radius", &c.mc.lattice_radius},
      {"mc", "n_records", &c.mc.n_records},
      {"mc", "z_end", &c.mc.z_end},
      {"mc", "dz", &c.mc.dz},
      {"output", "dir", &c.out_dir},
      {"run", "seed", &c.seed},
      {"run", "threads", &c.threads},
  };
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_plain(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto r = std::from_chars(first, s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// Decimal number, optionally written as [a]pi[/b] (e.g. 2pi/50).
bool parse_number(const std::string& raw, double& v) {
  const std::string s = trim(raw);
  const auto p = s.find("pi");
  if (p == std::string::npos) return parse_plain(s, v);
  double a = 1.0, b = 1.0;
  const std::string head = s.substr(0, p), tail = s.substr(p + 2);
  if (!head.empty() && !parse_plain(head, a)) return false;
  if (!tail.empty()) {
    if (tail[0] != '/' || !parse_plain(tail.substr(1), b) || b == 0.0) return false;
  }
  v = a * kPi / b;
  return true;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  {
    std::istringstream in(text);
    try {
      pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ValidationError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
  }
  // Line numbers for diagnostics.
  std::map<std::string, int> line_of;
  {
    std::istringstream in(text);
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t[0] == '[') {
        section = trim(t.substr(1, t.find(']') - 1));
        line_of.emplace(section, no);
        continue;
      }
      const auto eq = t.find('=');
      if (eq != std::string::npos) line_of.emplace(section + "." + trim(t.substr(0, eq)), no);
    }
  }
  auto where = [&](const std::string& key) {
    auto it = line_of.find(key);
    return origin + ":" + (it == line_of.end() ? std::string("?") : std::to_string(it->second));
  };

  RunConfig c;
  const std::vector<Entry> reg = registry(c);
  for (const auto& [section, body] : tree) {
    if (!body.data().empty())
      throw ValidationError(where(section) + ": key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const Entry* e = nullptr;
      for (const Entry& r : reg)
        if (r.section == section && r.key == key) e = &r;
      if (!e) throw ValidationError(where(full) + ": unknown key '" + full + "'");
      const std::string val = trim(node.data());
      auto bad = [&](const char* what) {
        return ValidationError(where(full) + ": key '" + full + "' expects " + what +
                               ", got '" + val + "'");
      };
      std::visit(
          [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
              if (!parse_number(val, *p)) throw bad("a number");
            } else if constexpr (std::is_same_v<T, int>) {
              const auto r = std::from_chars(val.data(), val.data() + val.size(), *p);
              if (r.ec != std::errc() || r.ptr != val.data() + val.size()) throw bad("an integer");
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
              const auto r = std::from_chars(val.data(), val.data() + val.size(), *p);
              if (r.ec != std::errc() || r.ptr != val.data() + val.size())
                throw bad("a non-negative integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
              *p = val;
            } else {
              p->clear();
              std::string item;
              std::istringstream items(val);
              while (std::getline(items, item, ',')) {
                double v;
                if (!parse_number(item, v)) throw bad("a comma-separated list of numbers");
                p->push_back(v);
              }
            }
          },
          e->target);
    }
  }

  auto check = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError(where(key) + ": key '" + key + "' " + what);
  };
  check(c.medium.model == "gaussian" || c.medium.model == "gaussian_transverse" ||
            c.medium.model == "tabulated",
        "medium.model", "must be gaussian, gaussian_transverse or tabulated");
  check(c.medium.model != "tabulated" || !c.medium.table.empty(), "medium.table",
        "is required for the tabulated model");
  check(c.source.kind == "gaussian_tm" || c.source.kind == "anisotropic_tm" ||
            c.source.kind == "current",
        "source.kind", "must be gaussian_tm, anisotropic_tm or current");
  check(c.medium.alpha > 0.0, "medium.alpha", "must be positive");
  check(c.medium.gamma > 0.0, "medium.gamma", "must be positive");
  check(c.medium.gamma_j > 0.0, "medium.gamma_j", "must be positive");
  check(c.medium.k > 0.0, "medium.k", "must be positive");
  check(c.medium.ell_z > 0.0, "medium.ell_z", "must be positive");
  check(c.source.gamma_j >= 0.0, "source.gamma_j", "must be non-negative");
  check(c.grid.layout == "polar" || c.grid.layout == "cartesian", "grid.layout",
        "must be polar or cartesian");
  check(c.grid.n_radial > 0 && c.grid.n_angular > 0, "grid.n_radial", "and n_angular must be positive");
  check(c.evolve.z_units == "mfp" || c.evolve.z_units == "absolute", "evolve.z_units",
        "must be mfp or absolute");
  check(c.evolve.z_end > 0.0, "evolve.z_end", "must be positive");
  check(c.evolve.record_every > 0, "evolve.record_every", "must be positive");
  check(c.mfp.n_points > 1, "mfp.n_points", "must exceed 1");
  check(!c.hf.gammas.empty(), "hf.gammas", "must not be empty");
  check(c.hf.n_steps > 0, "hf.n_steps", "must be positive");
  check(c.field.points.size() % 3 == 0 && !c.field.points.empty(), "field.points",
        "must hold (x, y, z) triples");
  check(c.mc.n_realizations >= 2, "mc.n_realizations", "must be at least 2");
  check(c.threads >= 0, "run.threads", "must be non-negative");

  if (!c.medium.table.empty() && origin != "<string>") {
    const std::filesystem::path tp(c.medium.table);
    if (tp.is_relative())
      c.medium.table = (std::filesystem::path(origin).parent_path() / tp).lexically_normal().string();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

SpectralMedium RunConfig::make_medium() const {
  const double gj = source.gamma_j > 0.0 ? source.gamma_j : medium.gamma_j;
  if (medium.model == "gaussian")
    return SpectralMedium::gaussian(medium.alpha, medium.gamma, gj, medium.k);
  if (medium.model == "gaussian_transverse")
    return SpectralMedium::gaussian_transverse(medium.alpha, medium.gamma, gj, medium.ell_z,
                                               medium.k);
  return SpectralMedium::tabulated(medium.alpha, medium.gamma, gj,
                                   read_correlation_table(medium.table), medium.k);
}

SourceSpec RunConfig::make_source() const {
  const double gj = source.gamma_j > 0.0 ? source.gamma_j : medium.gamma_j;
  if (source.kind == "current")
    return SourceSpec::gaussian_current(gj, source.jx, source.jy, source.jz, medium.k);
  SourceSpec s;
  s.kind = source.kind == "gaussian_tm" ? SourceKind::GaussianTMPower
                                        : SourceKind::AnisotropicGaussianTMPower;
  s.gamma_j = gj;
  s.k = medium.k;
  s.width_minor = source.width_minor;
  s.width_major = source.width_major;
  s.rotation = source.rotation;
  return s;
}

EnsembleConfig RunConfig::make_ensemble() const {
  EnsembleConfig e;
  e.epsilon = mc.epsilon;
  e.n_realizations = mc.n_realizations;
  e.box = mc.box;
  e.lattice_radius = mc.lattice_radius;
  e.n_records = mc.n_records;
  e.z_end = mc.z_end;
  e.dz = mc.dz;
  e.seed = seed;
  return e;
}

std::string RunConfig::to_json() const {
  RunConfig copy = *this;
  if (copy.source.gamma_j == 0.0) copy.source.gamma_j = copy.medium.gamma_j;
  nlohmann::ordered_json j;
  for (const Entry& e : registry(copy)) {
    nlohmann::ordered_json& slot = j[e.section][e.key];
    std::visit([&](auto* p) { slot = *p; }, e.target);
  }
  return j.dump();
}

}  // namespace polx
