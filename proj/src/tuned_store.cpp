#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include "rpbf/errors.hpp"
#include "rpbf/tuner.hpp"

namespace rpbf {

namespace {

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ' ' || ch == '\t' || ch == '=' || ch == '\n' || ch == '\r') ch = '_';
  }
  return s;
}

std::size_t round_up_pow2(std::size_t v) { return v <= 1 ? 1 : std::bit_ceil(v); }

std::size_t parse_count(const std::string& value) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(value, &pos);
  if (pos != value.size()) throw std::invalid_argument("trailing characters in '" + value + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string shape_class(const GemmProblem& p) {
  return std::to_string(round_up_pow2(p.m)) + "x" + std::to_string(round_up_pow2(p.n)) + "x" +
         std::to_string(round_up_pow2(p.k));
}

std::string machine_fingerprint() {
  std::string model = "unknown-cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        model = line.substr(colon + 1);
        model.erase(0, model.find_first_not_of(' '));
      }
      break;
    }
  }
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  const long long mib = pages > 0 && page_size > 0 ? static_cast<long long>(pages) * page_size / (1 << 20) : 0;
  return sanitize(model + "|" + std::to_string(std::thread::hardware_concurrency()) + "c|" + std::to_string(mib) +
                  "MiB");
}

void TunedStore::put(const TunedKey& key, const TileConfig& config) {
  config.validate(key.precision);
  TunedKey k = key;
  k.fingerprint = sanitize(k.fingerprint);
  entries_[k] = config;
}

std::optional<TileConfig> TunedStore::find(const TunedKey& key) const {
  TunedKey k = key;
  k.fingerprint = sanitize(k.fingerprint);
  if (auto it = entries_.find(k); it != entries_.end()) return it->second;
  return std::nullopt;
}

TileConfig TunedStore::lookup(const std::string& fingerprint, const GemmProblem& problem) const {
  if (auto hit = find(TunedKey{fingerprint, problem.precision, shape_class(problem)})) return *hit;
  return default_tile_config(problem.precision);
}

void TunedStore::save(std::ostream& os) const {
  os << "# rpbf tuned tile configurations\n";
  for (const auto& [key, c] : entries_) {
    os << "fingerprint=" << key.fingerprint << " precision=" << to_string(key.precision) << " shape=" << key.shape
       << " m_outer=" << c.m_outer << " m_inner=" << c.m_inner << " n_outer=" << c.n_outer
       << " n_inner=" << c.n_inner << " k_block=" << c.k_block << " buffers=" << c.buffers << '\n';
  }
}

void TunedStore::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write tuned store " + path.string());
  save(os);
}

TunedStore TunedStore::parse(std::istream& is, std::vector<std::string>* warnings) {
  TunedStore store;
  std::size_t line_no = 0;
  try {
    for (std::string line; std::getline(is, line);) {
      ++line_no;
      if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      std::istringstream fields(line);
      std::map<std::string, std::string> kv;
      for (std::string tok; fields >> tok;) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument(std::string("missing field ") + key);
        return it->second;
      };
      TunedKey key;
      key.fingerprint = need("fingerprint");
      const auto precision = parse_precision(need("precision"));
      if (!precision) throw std::invalid_argument("unknown precision '" + need("precision") + "'");
      key.precision = *precision;
      key.shape = need("shape");
      TileConfig c;
      c.m_outer = parse_count(need("m_outer"));
      c.m_inner = parse_count(need("m_inner"));
      c.n_outer = parse_count(need("n_outer"));
      c.n_inner = parse_count(need("n_inner"));
      c.k_block = parse_count(need("k_block"));
      c.buffers = parse_count(need("buffers"));
      if (auto msg = c.check(key.precision); !msg.empty()) throw std::invalid_argument(msg);
      store.entries_[key] = c;
    }
  } catch (const std::exception& e) {
    if (warnings) {
      warnings->push_back("tuned store line " + std::to_string(line_no) + ": " + e.what() +
                          "; falling back to default tile configurations");
    }
    return TunedStore{};
  }
  return store;
}

TunedStore TunedStore::load(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream is(path);
  if (!is) {
    if (warnings) warnings->push_back("tuned store " + path.string() + " not found; using default tile configurations");
    return TunedStore{};
  }
  return parse(is, warnings);
}

}  // namespace rpbf
