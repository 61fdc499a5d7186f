#include "tjflow/network_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tjflow/config.hpp"
#include "tjflow/errors.hpp"

namespace tjflow {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> numbers(const ConfigEntry& e, std::size_t count) {
  std::vector<double> out;
  std::istringstream is(e.value);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (end == tok.c_str() || (end && *end != '\0')) {
      std::ostringstream msg;
      msg << "line " << e.line << " (" << e.key << "): '" << tok << "' is not a number";
      throw Error(ErrorCode::ParseError, msg.str());
    }
    out.push_back(v);
  }
  if (out.size() != count) {
    std::ostringstream msg;
    msg << "line " << e.line << " (" << e.key << "): expected " << count << " values";
    throw Error(ErrorCode::ParseError, msg.str());
  }
  return out;
}

}  // namespace

std::string format_network(const StationaryNetwork& net) {
  std::ostringstream os;
  os << "[stationary_network]\n";
  os << "tensions = " << num(net.tensions.gamma[0]) << ", " << num(net.tensions.gamma[1]) << ", "
     << num(net.tensions.gamma[2]) << "\n";
  os << "p = " << num(net.p_star.x()) << ", " << num(net.p_star.y()) << "\n";
  os << "phi = " << num(net.phi) << "\n";
  os << "length = " << num(net.length[0]) << ", " << num(net.length[1]) << ", " << num(net.length[2]) << "\n";
  os << "h = " << num(net.h[0]) << ", " << num(net.h[1]) << ", " << num(net.h[2]) << "\n";
  for (int i = 0; i < 3; ++i)
    os << "endpoint" << i + 1 << " = " << num(net.endpoint[i].x()) << ", " << num(net.endpoint[i].y()) << "\n";
  return os.str();
}

bool is_network_text(const std::string& text) { return text.find("[stationary_network]") != std::string::npos; }

StationaryNetwork parse_network(const std::string& text) {
  std::map<std::string, ConfigEntry> fields;
  for (const auto& e : parse_entries(text)) {
    if (e.section != "stationary_network") continue;
    static const char* known[] = {"tensions", "p", "phi", "length", "h", "endpoint1", "endpoint2", "endpoint3"};
    bool ok = false;
    for (const char* k : known) ok = ok || e.key == k;
    if (!ok) {
      std::ostringstream msg;
      msg << "line " << e.line << ": unknown key '" << e.key << "'";
      throw Error(ErrorCode::ParseError, msg.str());
    }
    fields[e.key] = e;
  }
  for (const char* k : {"tensions", "p", "phi", "length", "h"})
    if (!fields.count(k)) throw Error(ErrorCode::ValidationError, std::string("stationary_network.") + k + ": required");

  SurfaceTensions t;
  const auto g = numbers(fields["tensions"], 3);
  t.gamma = {g[0], g[1], g[2]};
  const auto l = numbers(fields["length"], 3);
  const auto h = numbers(fields["h"], 3);
  StationaryNetwork net = abstract_network(t, {l[0], l[1], l[2]}, {h[0], h[1], h[2]});
  const auto p = numbers(fields["p"], 2);
  net.p_star = {p[0], p[1]};
  net.phi = numbers(fields["phi"], 1)[0];
  net.tangent = junction_tangents(net.angles, net.phi);
  for (int i = 0; i < 3; ++i) {
    net.normal[i] = rot90(net.tangent[i]);
    const std::string key = "endpoint" + std::to_string(i + 1);
    if (fields.count(key)) {
      const auto x = numbers(fields[key], 2);
      net.endpoint[i] = {x[0], x[1]};
    } else {
      net.endpoint[i] = net.reference_point(i, net.length[i]);
    }
  }
  return net;
}

void write_network(const StationaryNetwork& network, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << format_network(network);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

StationaryNetwork read_network(const std::string& path) { return parse_network(read_text_file(path)); }

void write_eigenfunction(const StationaryNetwork& network, const BranchValues& phi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << "branch,sigma,phi\n";
  for (int i = 0; i < 3; ++i) {
    const auto& f = phi[static_cast<std::size_t>(i)];
    if (f.size() < 2) continue;
    const double ds = network.length[i] / static_cast<double>(f.size() - 1);
    for (std::size_t j = 0; j < f.size(); ++j)
      out << i + 1 << "," << num(static_cast<double>(j) * ds) << "," << num(f[j]) << "\n";
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace tjflow
