#include "config.h"

#include <fstream>
#include <sstream>

namespace dramdse {

namespace {

std::string Trim(const std::string& s) {
  const size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string StripComment(const std::string& line) {
  const size_t hash = line.find('#');
  return Trim(hash == std::string::npos ? line : line.substr(0, hash));
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

int64_t ParseInt(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    const int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected an integer, got '" + s + "'");
  }
}

double ParseDouble(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected a number, got '" + s + "'");
  }
}

// key = value (or key value) pairs, lower-cased keys.
std::vector<std::pair<std::string, std::string>> ParseKeyValues(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  int lineno = 0;
  for (const std::string& raw : ReadLines(path)) {
    ++lineno;
    std::string line = StripComment(raw);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    std::string key, value;
    if (eq != std::string::npos) {
      key = Trim(line.substr(0, eq));
      value = Trim(line.substr(eq + 1));
    } else {
      std::istringstream ss(line);
      ss >> key;
      std::getline(ss, value);
      value = Trim(value);
    }
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    for (char& c : key) c = char(std::tolower(c));
    out.emplace_back(key, value);
  }
  return out;
}

}  // namespace

std::vector<LayerShape> LoadNetwork(const std::string& path) {
  std::vector<LayerShape> layers;
  int lineno = 0;
  for (const std::string& raw : ReadLines(path)) {
    ++lineno;
    const std::string line = StripComment(raw);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    const std::string context = path + ":" + std::to_string(lineno);
    if (tokens.size() < 9) {
      throw ConfigError(context +
                        ": layer record needs 9 fields (name c_in h_in w_in "
                        "m_out p q stride element_bytes)");
    }
    LayerShape layer;
    layer.name = tokens[0];
    layer.c_in = int(ParseInt(tokens[1], context + " c_in"));
    layer.h_in = int(ParseInt(tokens[2], context + " h_in"));
    layer.w_in = int(ParseInt(tokens[3], context + " w_in"));
    layer.m_out = int(ParseInt(tokens[4], context + " m_out"));
    layer.p = int(ParseInt(tokens[5], context + " p"));
    layer.q = int(ParseInt(tokens[6], context + " q"));
    layer.stride = int(ParseInt(tokens[7], context + " stride"));
    layer.element_bytes = int(ParseInt(tokens[8], context + " element_bytes"));
    for (size_t i = 9; i < tokens.size(); ++i) {
      const size_t eq = tokens[i].find('=');
      if (eq == std::string::npos) {
        throw ConfigError(context + ": unexpected token '" + tokens[i] + "'");
      }
      const std::string key = tokens[i].substr(0, eq);
      const std::string value = tokens[i].substr(eq + 1);
      if (key == "scale") {
        layer.traffic_scale = ParseDouble(value, context + " scale");
      } else {
        throw ConfigError(context + ": unknown layer option '" + key + "'");
      }
    }
    layers.push_back(DeriveOutputDims(layer));
  }
  if (layers.empty()) throw ConfigError(path + ": no layers found");
  return layers;
}

GeometryConfig LoadGeometry(const std::string& path) {
  GeometryConfig config;
  bool have_kind = false;
  bool have_banks = false, have_subarrays = false, have_rows = false,
       have_columns = false, have_unit = false;
  for (const auto& [key, value] : ParseKeyValues(path)) {
    const std::string context = path + " " + key;
    if (key == "kind" || key == "arch") {
      const auto kind = ParseArchKind(value);
      if (!kind) throw ConfigError(context + ": unknown arch '" + value + "'");
      config.variant = ArchVariant::For(*kind);
      have_kind = true;
    } else if (key == "channels") {
      config.geometry.channels = int(ParseInt(value, context));
    } else if (key == "ranks_per_channel") {
      config.geometry.ranks_per_channel = int(ParseInt(value, context));
    } else if (key == "chips_per_rank") {
      config.geometry.chips_per_rank = int(ParseInt(value, context));
    } else if (key == "banks_per_chip") {
      config.geometry.banks_per_chip = int(ParseInt(value, context));
      have_banks = true;
    } else if (key == "subarrays_per_bank") {
      config.geometry.subarrays_per_bank = int(ParseInt(value, context));
      have_subarrays = true;
    } else if (key == "rows_near") {
      config.geometry.rows_near = int(ParseInt(value, context));
      have_rows = true;
    } else if (key == "rows_far") {
      config.geometry.rows_far = int(ParseInt(value, context));
    } else if (key == "columns_per_row") {
      config.geometry.columns_per_row = int(ParseInt(value, context));
      have_columns = true;
    } else if (key == "access_unit_bytes") {
      config.geometry.access_unit_bytes = int(ParseInt(value, context));
      have_unit = true;
    } else {
      throw ConfigError(path + ": unknown geometry key '" + key + "'");
    }
  }
  if (!have_kind || !have_banks || !have_subarrays || !have_rows ||
      !have_columns || !have_unit) {
    throw ConfigError(path +
                      ": geometry needs kind, banks_per_chip, "
                      "subarrays_per_bank, rows_near, columns_per_row and "
                      "access_unit_bytes");
  }
  config.geometry.Validate();
  return config;
}

CostProfile LoadProfile(const std::string& path, bool allow_unordered) {
  CostProfile profile;
  bool have_arch = false;
  std::array<bool, kNumAccessClasses> have_cycles{};
  std::array<bool, kNumAccessClasses> have_energy{};
  auto class_of = [&](const std::string& name) -> int {
    for (int i = 0; i < kNumAccessClasses; ++i) {
      if (name == ToString(AccessClass(i))) return i;
    }
    return -1;
  };
  for (const auto& [key, value] : ParseKeyValues(path)) {
    const std::string context = path + " " + key;
    if (key == "arch" || key == "kind") {
      const auto kind = ParseArchKind(value);
      if (!kind) throw ConfigError(context + ": unknown arch '" + value + "'");
      profile.arch = *kind;
      have_arch = true;
    } else if (key.rfind("cycles_", 0) == 0) {
      const int c = class_of(key.substr(7));
      if (c < 0) throw ConfigError(path + ": unknown profile key '" + key + "'");
      const int64_t v = ParseInt(value, context);
      if (v < 0) throw ConfigError(context + ": must be >= 0");
      profile.cycles[c] = uint64_t(v);
      have_cycles[c] = true;
    } else if (key.rfind("energy_", 0) == 0) {
      const int c = class_of(key.substr(7));
      if (c < 0) throw ConfigError(path + ": unknown profile key '" + key + "'");
      profile.energy_nj[c] = ParseDouble(value, context);
      have_energy[c] = true;
    } else {
      throw ConfigError(path + ": unknown profile key '" + key + "'");
    }
  }
  if (!have_arch) throw ConfigError(path + ": profile needs an arch");
  for (int i = 0; i < kNumAccessClasses; ++i) {
    if (!have_cycles[i] || !have_energy[i]) {
      throw ConfigError(path + ": profile needs cycles_ and energy_ for " +
                        ToString(AccessClass(i)));
    }
  }
  try {
    profile.Validate(allow_unordered);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return profile;
}

std::vector<ArchConfig> BuildArchConfigs(
    const std::vector<GeometryConfig>& geometries,
    const std::vector<CostProfile>& profiles) {
  std::vector<ArchConfig> archs;
  for (const GeometryConfig& g : geometries) {
    const CostProfile* match = nullptr;
    for (const CostProfile& p : profiles) {
      if (p.arch == g.variant.kind) {
        match = &p;
        break;
      }
    }
    if (match == nullptr) {
      throw ConfigError(std::string("no cost profile for arch ") +
                        ToString(g.variant.kind));
    }
    archs.push_back(ArchConfig{g.variant, g.geometry, *match});
  }
  return archs;
}

}  // namespace dramdse
