#include "laneemden/profile_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace laneemden {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string exponent_text(const CriticalPair& pair) {
  if (pair.p_exact) {
    if (pair.p_exact->den == 1) return std::to_string(pair.p_exact->num);
    return std::to_string(pair.p_exact->num) + "/" + std::to_string(pair.p_exact->den);
  }
  return shortest(pair.p);
}

std::string point_tag(const CriticalPair& pair) {
  std::string p = exponent_text(pair);
  for (char& c : p) {
    if (c == '/') c = '_';
  }
  return "N" + std::to_string(pair.N) + "_p" + p;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string profile_csv(const GroundStateProfile& prof) {
  std::string out = "r,u,v,du,dv\n";
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    out += shortest(prof.grid.nodes[i]) + ',' + shortest(prof.u[i]) + ',' + shortest(prof.v[i]) + ',' +
           shortest(prof.du[i]) + ',' + shortest(prof.dv[i]) + '\n';
  }
  return out;
}

std::string profile_sidecar(const GroundStateProfile& prof) {
  json j;
  j["N"] = prof.pair.N;
  j["p"] = exponent_text(prof.pair);
  j["p_value"] = prof.pair.p;
  j["q_value"] = prof.pair.q;
  j["regime"] = to_string(prof.pair.regime);
  j["gamma_star"] = prof.gamma_star;
  j["u0"] = prof.u0;
  j["rtol"] = prof.rtol;
  j["r_start"] = prof.grid.r_start();
  j["r_max"] = prof.grid.r_max();
  j["nodes"] = prof.grid.size();
  j["method"] = "shooting on v(0), Dormand-Prince classification, Fehlberg 7(8) recording";
  return j.dump(2) + "\n";
}

fs::path save_profile(const GroundStateProfile& prof, const fs::path& dir) {
  const std::string tag = point_tag(prof.pair);
  const fs::path csv = dir / ("gs_" + tag + ".csv");
  write_file_atomic(csv, profile_csv(prof));
  write_file_atomic(dir / ("gs_" + tag + ".json"), profile_sidecar(prof));
  return csv;
}

std::optional<GroundStateProfile> load_profile(const fs::path& dir, const CriticalPair& pair) {
  const std::string tag = point_tag(pair);
  const fs::path csv = dir / ("gs_" + tag + ".csv");
  const fs::path side = dir / ("gs_" + tag + ".json");
  if (!fs::exists(csv) || !fs::exists(side)) return std::nullopt;
  GroundStateProfile prof;
  prof.pair = pair;
  json j;
  try {
    j = json::parse(read_file(side));
    prof.gamma_star = j.at("gamma_star").get<double>();
    prof.u0 = j.at("u0").get<double>();
    prof.rtol = j.at("rtol").get<double>();
    if (j.at("N").get<int>() != pair.N || j.at("p").get<std::string>() != exponent_text(pair)) {
      throw std::runtime_error("sidecar describes a different point");
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed profile sidecar " + side.string() + ": " + e.what());
  }
  std::istringstream in(read_file(csv));
  std::string line;
  std::getline(in, line);
  if (line != "r,u,v,du,dv") throw std::runtime_error("unexpected profile header in " + csv.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double vals[5];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 5; ++k) {
      const auto res = std::from_chars(p, end, vals[k]);
      if (res.ec != std::errc{}) throw std::runtime_error("malformed profile row in " + csv.string());
      p = res.ptr;
      if (k < 4) {
        if (p == end || *p != ',') throw std::runtime_error("malformed profile row in " + csv.string());
        ++p;
      }
    }
    prof.grid.nodes.push_back(vals[0]);
    prof.u.push_back(vals[1]);
    prof.v.push_back(vals[2]);
    prof.du.push_back(vals[3]);
    prof.dv.push_back(vals[4]);
  }
  if (prof.grid.size() < 16) throw std::runtime_error("profile too short in " + csv.string());
  prof.finalize();
  return prof;
}

CacheCheck validate_profile(const GroundStateProfile& prof, double max_residual) {
  CacheCheck c;
  if (!profile_shape_ok(prof)) {
    c.reason = "profile is not positive and decreasing";
    c.residual = INFINITY;
    return c;
  }
  c.residual = ode_residual(prof);
  c.ok = c.residual <= max_residual;
  if (!c.ok) c.reason = "ODE residual " + shortest(c.residual) + " exceeds " + shortest(max_residual);
  return c;
}

}  // namespace laneemden
