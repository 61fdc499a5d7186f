#include "tjflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "tjflow/errors.hpp"

namespace tjflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string where(const ConfigEntry& e) {
  std::ostringstream os;
  os << "line " << e.line << " (" << e.section << "." << e.key << ")";
  return os.str();
}

double to_double(const ConfigEntry& e, const std::string& token) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error(ErrorCode::ParseError, where(e) + ": '" + t + "' is not a number");
  return v;
}

long to_long(const ConfigEntry& e) {
  const std::string t = trim(e.value);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error(ErrorCode::ParseError, where(e) + ": '" + t + "' is not an integer");
  return v;
}

std::vector<double> to_list(const ConfigEntry& e) {
  std::vector<double> out;
  std::string tok;
  std::istringstream is(e.value);
  while (std::getline(is, tok, ',')) out.push_back(to_double(e, tok));
  return out;
}

std::vector<double> to_fixed_list(const ConfigEntry& e, std::size_t n) {
  auto v = to_list(e);
  if (v.size() != n) {
    std::ostringstream msg;
    msg << where(e) << ": expected " << n << " comma-separated values, got " << v.size();
    throw Error(ErrorCode::ParseError, msg.str());
  }
  return v;
}

std::vector<PolynomialTerm> to_terms(const ConfigEntry& e) {
  std::vector<PolynomialTerm> terms;
  std::string group;
  std::istringstream is(e.value);
  while (std::getline(is, group, ';')) {
    if (trim(group).empty()) continue;
    std::istringstream gs(group);
    std::string a, b, c;
    if (!(gs >> a >> b >> c))
      throw Error(ErrorCode::ParseError, where(e) + ": polynomial terms are 'i j c' groups separated by ';'");
    std::string extra;
    if (gs >> extra) throw Error(ErrorCode::ParseError, where(e) + ": too many fields in a polynomial term");
    ConfigEntry sub = e;
    PolynomialTerm t;
    t.i = static_cast<int>(to_double(sub, a));
    t.j = static_cast<int>(to_double(sub, b));
    t.c = to_double(sub, c);
    if (static_cast<double>(t.i) != to_double(sub, a) || static_cast<double>(t.j) != to_double(sub, b))
      throw Error(ErrorCode::ParseError, where(e) + ": exponents must be integers");
    terms.push_back(t);
  }
  return terms;
}

void validation(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::ValidationError, field + ": " + reason);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"type", "radius", "semi_axes", "coefficients", "bbox"}},
      {"network", {"tensions", "guess", "phi", "gauge", "tol", "max_iter"}},
      {"grid", {"n"}},
      {"spectrum", {"n"}},
      {"evolve", {"dt", "dt_factor", "t_end", "output_every", "newton_tol", "newton_max", "det_m_floor", "max_amplitude"}},
      {"perturbation", {"mode", "amplitude", "cos1", "cos2", "cos3", "modes"}},
      {"output", {"path", "seed"}},
  };
  return keys;
}

}  // namespace

std::vector<ConfigEntry> parse_entries(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        std::ostringstream msg;
        msg << "line " << line << ": malformed section header '" << s << "'";
        throw Error(ErrorCode::ParseError, msg.str());
      }
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line << ": expected 'key = value', got '" << s << "'";
      throw Error(ErrorCode::ParseError, msg.str());
    }
    ConfigEntry e;
    e.line = line;
    e.key = trim(s.substr(0, eq));
    e.value = trim(s.substr(eq + 1));
    e.section = section;
    if (section.empty()) {
      const auto dot = e.key.find('.');
      if (dot != std::string::npos) {
        e.section = e.key.substr(0, dot);
        e.key = e.key.substr(dot + 1);
      }
    }
    if (e.key.empty()) {
      std::ostringstream msg;
      msg << "line " << line << ": empty key";
      throw Error(ErrorCode::ParseError, msg.str());
    }
    out.push_back(e);
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  const auto entries = parse_entries(text);
  std::set<std::string> seen;
  bool has_tensions = false;
  bool has_radius = false;
  bool has_axes = false;
  for (const auto& e : entries) {
    const auto& keys = known_keys();
    const auto sec = keys.find(e.section);
    if (sec == keys.end() || !sec->second.count(e.key)) {
      std::ostringstream msg;
      msg << "line " << e.line << ": unknown key '" << (e.section.empty() ? "" : e.section + ".") << e.key << "'";
      throw Error(ErrorCode::ParseError, msg.str());
    }
    const std::string full = e.section + "." + e.key;
    if (!seen.insert(full).second) throw Error(ErrorCode::ParseError, where(e) + ": duplicate key");

    if (full == "domain.type") c.domain.type = e.value;
    else if (full == "domain.radius") { c.domain.radius = to_double(e, e.value); has_radius = true; }
    else if (full == "domain.semi_axes") {
      const auto v = to_fixed_list(e, 2);
      c.domain.a = v[0];
      c.domain.b = v[1];
      has_axes = true;
    } else if (full == "domain.coefficients") c.domain.terms = to_terms(e);
    else if (full == "domain.bbox") {
      const auto v = to_fixed_list(e, 4);
      c.domain.bbox = BoundingBox{v[0], v[1], v[2], v[3]};
    } else if (full == "network.tensions") {
      const auto v = to_fixed_list(e, 3);
      c.tensions.gamma = {v[0], v[1], v[2]};
      has_tensions = true;
    } else if (full == "network.guess") {
      const auto v = to_fixed_list(e, 2);
      c.guess = {v[0], v[1]};
    } else if (full == "network.phi") c.phi = to_double(e, e.value);
    else if (full == "network.gauge") c.gauge = to_double(e, e.value);
    else if (full == "network.tol") c.steady_tol = to_double(e, e.value);
    else if (full == "network.max_iter") c.steady_max_iter = static_cast<int>(to_long(e));
    else if (full == "grid.n") c.evolve.n = static_cast<int>(to_long(e));
    else if (full == "spectrum.n") c.spectrum_n = static_cast<int>(to_long(e));
    else if (full == "evolve.dt") c.evolve.dt = to_double(e, e.value);
    else if (full == "evolve.dt_factor") c.dt_factor = to_double(e, e.value);
    else if (full == "evolve.t_end") c.evolve.t_end = to_double(e, e.value);
    else if (full == "evolve.output_every") c.evolve.output_every = static_cast<int>(to_long(e));
    else if (full == "evolve.newton_tol") c.evolve.newton_tol = to_double(e, e.value);
    else if (full == "evolve.newton_max") c.evolve.newton_max = static_cast<int>(to_long(e));
    else if (full == "evolve.det_m_floor") c.evolve.det_m_floor = to_double(e, e.value);
    else if (full == "evolve.max_amplitude") c.evolve.max_amplitude = to_double(e, e.value);
    else if (full == "perturbation.mode") c.perturbation.mode = e.value;
    else if (full == "perturbation.amplitude") c.perturbation.amplitude = to_double(e, e.value);
    else if (full == "perturbation.cos1") c.perturbation.cosine[0] = to_list(e);
    else if (full == "perturbation.cos2") c.perturbation.cosine[1] = to_list(e);
    else if (full == "perturbation.cos3") c.perturbation.cosine[2] = to_list(e);
    else if (full == "perturbation.modes") c.perturbation.modes = static_cast<int>(to_long(e));
    else if (full == "output.path") c.output_path = e.value;
    else if (full == "output.seed") {
      const long s = to_long(e);
      if (s < 0) validation("output.seed", "must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    }
  }

  if (!has_tensions) validation("network.tensions", "required");
  try {
    validate_tensions(c.tensions);
  } catch (const Error& e) {
    validation("network.tensions", e.what());
  }
  const auto& t = c.domain.type;
  if (t == "circle") {
    if (!has_radius) validation("domain.radius", "required for a circle");
    if (!(c.domain.radius > 0.0)) validation("domain.radius", "must be positive");
  } else if (t == "ellipse") {
    if (!has_axes) validation("domain.semi_axes", "required for an ellipse");
    if (!(c.domain.a > 0.0) || !(c.domain.b > 0.0)) validation("domain.semi_axes", "must be positive");
  } else if (t == "polynomial") {
    if (c.domain.terms.empty()) validation("domain.coefficients", "required for a polynomial domain");
    for (const auto& term : c.domain.terms)
      if (term.i < 0 || term.j < 0) validation("domain.coefficients", "exponents must be non-negative");
  } else {
    validation("domain.type", "must be circle, ellipse or polynomial, got '" + t + "'");
  }
  if (c.domain.bbox && (!(c.domain.bbox->xmax > c.domain.bbox->xmin) || !(c.domain.bbox->ymax > c.domain.bbox->ymin)))
    validation("domain.bbox", "must be xmin, xmax, ymin, ymax with xmin < xmax and ymin < ymax");
  if (!(c.steady_tol > 0.0)) validation("network.tol", "must be positive");
  if (c.steady_max_iter < 1) validation("network.max_iter", "must be at least 1");
  if (c.evolve.n < 8) validation("grid.n", "must be at least 8");
  if (c.spectrum_n < 8) validation("spectrum.n", "must be at least 8");
  if (c.evolve.dt < 0.0) validation("evolve.dt", "must be positive");
  if (!(c.dt_factor > 0.0) || c.dt_factor > 0.5) validation("evolve.dt_factor", "must lie in (0, 0.5]");
  if (c.evolve.t_end < 0.0) validation("evolve.t_end", "must be non-negative");
  if (c.evolve.output_every < 1) validation("evolve.output_every", "must be at least 1");
  if (!(c.evolve.newton_tol > 0.0)) validation("evolve.newton_tol", "must be positive");
  if (c.evolve.newton_max < 1) validation("evolve.newton_max", "must be at least 1");
  if (!(c.evolve.det_m_floor > 0.0) || c.evolve.det_m_floor >= 1.0) validation("evolve.det_m_floor", "must lie in (0, 1)");
  if (!(c.evolve.max_amplitude > 0.0)) validation("evolve.max_amplitude", "must be positive");
  const auto& m = c.perturbation.mode;
  if (m != "none" && m != "cosine" && m != "eigenmode" && m != "random")
    validation("perturbation.mode", "must be none, cosine, eigenmode or random, got '" + m + "'");
  if (c.perturbation.amplitude < 0.0) validation("perturbation.amplitude", "must be non-negative");
  if (m != "none" && !(c.perturbation.amplitude > 0.0)) validation("perturbation.amplitude", "required for this mode");
  if (c.perturbation.modes < 1) validation("perturbation.modes", "must be at least 1");
  if (m == "cosine" && c.perturbation.cosine[0].empty() && c.perturbation.cosine[1].empty() &&
      c.perturbation.cosine[2].empty())
    validation("perturbation.cos1", "cosine mode needs at least one coefficient list");
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

ImplicitDomain make_domain(const DomainSpec& spec) {
  if (spec.type == "circle") {
    ImplicitDomain d = ImplicitDomain::circle(spec.radius);
    return d;
  }
  if (spec.type == "ellipse") return ImplicitDomain::ellipse(spec.a, spec.b);
  return ImplicitDomain::polynomial(spec.terms, spec.bbox.value_or(BoundingBox{-5.0, 5.0, -5.0, 5.0}));
}

std::string override_config_value(const std::string& text, const std::string& name, const std::string& value) {
  std::string base = name;
  int index = -1;
  const auto br = name.find('[');
  if (br != std::string::npos) {
    if (name.back() != ']') throw Error(ErrorCode::ValidationError, "malformed parameter name '" + name + "'");
    index = std::stoi(name.substr(br + 1, name.size() - br - 2));
    base = name.substr(0, br);
  }
  const auto dot = base.find('.');
  if (dot == std::string::npos) throw Error(ErrorCode::ValidationError, "parameter must be section.key, got '" + name + "'");
  const std::string section = base.substr(0, dot);
  const std::string key = base.substr(dot + 1);
  const auto sec = known_keys().find(section);
  if (sec == known_keys().end() || !sec->second.count(key))
    throw Error(ErrorCode::ValidationError, "unknown parameter '" + base + "'");

  const auto entries = parse_entries(text);
  int target = 0;
  std::string old;
  for (const auto& e : entries)
    if (e.section == section && e.key == key) {
      target = e.line;
      old = e.value;
    }
  std::string replacement = value;
  if (index >= 0) {
    if (target == 0) throw Error(ErrorCode::ValidationError, "cannot index into absent key '" + base + "'");
    std::vector<std::string> parts;
    std::string tok;
    std::istringstream is(old);
    while (std::getline(is, tok, ',')) parts.push_back(trim(tok));
    if (index >= static_cast<int>(parts.size())) throw Error(ErrorCode::ValidationError, "index out of range in '" + name + "'");
    parts[static_cast<std::size_t>(index)] = value;
    replacement.clear();
    for (std::size_t k = 0; k < parts.size(); ++k) replacement += (k ? ", " : "") + parts[k];
  }
  std::istringstream is(text);
  std::ostringstream os;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (line == target) os << key << " = " << replacement << "\n";
    else os << raw << "\n";
  }
  std::string out = os.str();
  if (target == 0) {
    // Dotted keys are only read before the first section header.
    out = section + "." + key + " = " + replacement + "\n" + out;
  }
  return out;
}

Perturbation make_perturbation(const RunConfig& config, const StationaryNetwork& network) {
  const auto& p = config.perturbation;
  Perturbation out;
  out.amplitude = p.amplitude;
  if (p.mode == "none") return out;
  if (p.mode == "eigenmode") return eigenmode_perturbation(network, config.evolve.n, p.amplitude);
  out.kind = Perturbation::Kind::Cosine;
  if (p.mode == "cosine") {
    out.cosine = p.cosine;
    return out;
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (auto& c : out.cosine) {
    c.resize(static_cast<std::size_t>(p.modes));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeff(rng) / static_cast<double>((k + 1) * (k + 1));
  }
  return out;
}

double resolve_dt(const RunConfig& config, const StationaryNetwork& network) {
  if (config.evolve.dt > 0.0) return config.evolve.dt;
  const double lmin = *std::min_element(network.length.begin(), network.length.end());
  const double h = lmin / config.evolve.n;
  return config.dt_factor * h * h;
}

}  // namespace tjflow
