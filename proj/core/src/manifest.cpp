#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "pechaos/runio.hpp"

namespace pechaos {

void RunManifest::write(const std::string& path) const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash));
  j["config_hash"] = buf;
  j["seed"] = seed;
  j["code_version"] = code_version;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["summary"] = summary;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " into place");
}

}  // namespace pechaos
