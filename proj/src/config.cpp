#include "sparsevar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sparsevar/errors.hpp"

namespace sparsevar {

#ifndef SPARSEVAR_VERSION
#define SPARSEVAR_VERSION "0.0.0"
#endif

const char* const kVersion = SPARSEVAR_VERSION;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// where a value came from, for diagnostics
struct Loc {
  const std::string* origin;
  int line;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(*origin + ":" + std::to_string(line) + ": " + key + ": " + msg);
  }
};

std::uint64_t to_u64(const std::string& v, const Loc& at) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    at.fail("expected an unsigned 64-bit integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& v, const Loc& at, int lo) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    at.fail("expected an integer, got '" + v + "'");
  }
  if (out < lo) at.fail("must be at least " + std::to_string(lo) + ", got " + v);
  return out;
}

double to_double(const std::string& v, const Loc& at) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    at.fail("expected a finite number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v, const Loc& at) {
  const std::string t = lower(v);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  at.fail("expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v, const Loc& at) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) at.fail("empty list element in '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) at.fail("expected a non-empty list");
  return out;
}

// rethrows library ConfigErrors with the location attached
template <typename F>
auto located(const Loc& at, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    at.fail(e.what());
  }
}

std::string show(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T, typename Show>
std::string show_list(const std::vector<T>& v, Show&& one) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += one(v[i]);
  }
  return out;
}

std::string show_bool(bool b) { return b ? "true" : "false"; }

struct KeyDef {
  std::string section;  // empty: top level
  std::string name;
  bool canonical = true;
  std::function<void(RunConfig&, const std::string&, const Loc&)> set;
  std::function<std::string(const RunConfig&)> get;

  std::string qualified() const { return section.empty() ? name : section + "." + name; }
};

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = [] {
    std::vector<KeyDef> k;
    const auto add = [&](std::string sec, std::string name, auto set, auto get,
                         bool canonical = true) {
      k.push_back({std::move(sec), std::move(name), canonical, set, get});
    };
    const auto i = [](auto v) { return std::to_string(v); };

    add("", "command",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.command = located(at, [&] { return parse_command(v); });
        },
        [](const RunConfig& c) { return command_name(c.command); });
    add("", "seed",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.seed = to_u64(v, at); },
        [](const RunConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string("none"); });
    add("", "threads",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.threads = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.threads); }, false);
    add("", "out", [](RunConfig& c, const std::string& v, const Loc&) { c.out = v; },
        [](const RunConfig& c) { return c.out; }, false);

    add("estimators", "names",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.names = to_list(v, at); },
        [](const RunConfig& c) {
          return show_list(c.estimators.names, [](const std::string& s) { return s; });
        });
    add("estimators", "lambda_grid",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.lambda_grid = to_int(v, at, 2); },
        [i](const RunConfig& c) { return i(c.estimators.lambda_grid); });
    add("estimators", "lambda_ratio",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.lambda_ratio = to_double(v, at); },
        [](const RunConfig& c) { return show(c.estimators.lambda_ratio); });
    add("estimators", "eric_nu",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.eric_nu = to_double(v, at); },
        [](const RunConfig& c) { return show(c.estimators.eric_nu); });
    add("estimators", "threshold_rule",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          located(at, [&] { return parse_threshold_rule(v); });
          c.estimators.threshold_rule = v;
        },
        [](const RunConfig& c) { return c.estimators.threshold_rule; });
    add("estimators", "threshold_multiplier",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.threshold_multiplier = to_double(v, at); },
        [](const RunConfig& c) { return show(c.estimators.threshold_multiplier); });
    add("estimators", "reselect_lambda",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.reselect_lambda = to_bool(v, at); },
        [](const RunConfig& c) { return show_bool(c.estimators.reselect_lambda); });
    add("estimators", "cv_splits",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.cv_splits = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.estimators.cv_splits); });
    add("estimators", "cv_grid",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimators.cv_grid = to_int(v, at, 2); },
        [i](const RunConfig& c) { return i(c.estimators.cv_grid); });

    add("model", "source",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          const std::string t = lower(v);
          if (t != "example1" && t != "example2" && t != "file") {
            at.fail("expected example1, example2 or file, got '" + v + "'");
          }
          c.model.source = t;
        },
        [](const RunConfig& c) { return c.model.source; });
    add("model", "variant",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.model.variant = located(at, [&] { return parse_example1_variant(v); });
        },
        [](const RunConfig& c) { return variant_name(c.model.variant); });
    add("model", "d",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.model.d = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.model.d); });
    add("model", "s",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.model.s = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.model.s); });
    add("model", "rho",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.model.rho = to_double(v, at); },
        [](const RunConfig& c) { return show(c.model.rho); });
    add("model", "file", [](RunConfig& c, const std::string& v, const Loc&) { c.model.file = v; },
        [](const RunConfig& c) { return c.model.file; });
    add("model", "n",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.model.n = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.model.n); });
    add("model", "burn_in",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.model.burn_in = to_int(v, at, 0); },
        [i](const RunConfig& c) { return i(c.model.burn_in); });

    add("estimate", "series", [](RunConfig& c, const std::string& v, const Loc&) { c.estimate.series = v; },
        [](const RunConfig& c) { return c.estimate.series; });
    add("estimate", "truth", [](RunConfig& c, const std::string& v, const Loc&) { c.estimate.truth = v; },
        [](const RunConfig& c) { return c.estimate.truth; });
    add("estimate", "p",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.estimate.p = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.estimate.p); });

    add("benchmark", "example",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          const int e = to_int(v, at, 1);
          if (e > 2) at.fail("expected 1 or 2, got " + v);
          c.benchmark.example = e;
        },
        [i](const RunConfig& c) { return i(c.benchmark.example); });
    add("benchmark", "variant",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.variants.clear();
          for (const auto& s : to_list(v, at)) {
            c.benchmark.variants.push_back(located(at, [&] { return parse_example1_variant(s); }));
          }
        },
        [](const RunConfig& c) { return show_list(c.benchmark.variants, variant_name); });
    add("benchmark", "d",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.d.clear();
          for (const auto& s : to_list(v, at)) c.benchmark.d.push_back(to_int(s, at, 1));
        },
        [i](const RunConfig& c) { return show_list(c.benchmark.d, i); });
    add("benchmark", "s",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.s.clear();
          for (const auto& s : to_list(v, at)) c.benchmark.s.push_back(to_int(s, at, 1));
        },
        [i](const RunConfig& c) { return show_list(c.benchmark.s, i); });
    add("benchmark", "rho",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.rho.clear();
          for (const auto& s : to_list(v, at)) c.benchmark.rho.push_back(to_double(s, at));
        },
        [](const RunConfig& c) { return show_list(c.benchmark.rho, [](double x) { return show(x); }); });
    add("benchmark", "n",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.n.clear();
          for (const auto& s : to_list(v, at)) c.benchmark.n.push_back(to_int(s, at, 2));
        },
        [i](const RunConfig& c) { return show_list(c.benchmark.n, i); });
    add("benchmark", "replications",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.benchmark.replications = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.benchmark.replications); });
    add("benchmark", "horizon",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.benchmark.horizon = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.benchmark.horizon); });
    add("benchmark", "burn_in",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.benchmark.burn_in = to_int(v, at, 0); },
        [i](const RunConfig& c) { return i(c.benchmark.burn_in); });
    add("benchmark", "norm",
        [](RunConfig& c, const std::string& v, const Loc& at) {
          c.benchmark.norm = located(at, [&] { return parse_norm_kind(v); });
        },
        [](const RunConfig& c) { return norm_name(c.benchmark.norm); });
    add("benchmark", "n_freq",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.benchmark.n_freq = to_int(v, at, 1); },
        [i](const RunConfig& c) { return i(c.benchmark.n_freq); });
    add("benchmark", "redraw",
        [](RunConfig& c, const std::string& v, const Loc& at) { c.benchmark.redraw = to_bool(v, at); },
        [](const RunConfig& c) { return show_bool(c.benchmark.redraw); });

    const auto verify_int = [&](const char* name, int VerifyOptions::*field, int lo) {
      add("verify", name,
          [field, lo](RunConfig& c, const std::string& v, const Loc& at) { c.verify.*field = to_int(v, at, lo); },
          [field](const RunConfig& c) { return std::to_string(c.verify.*field); });
    };
    verify_int("models", &VerifyOptions::models, 1);
    verify_int("lp_problems", &VerifyOptions::lp_problems, 1);
    verify_int("threshold_sets", &VerifyOptions::threshold_sets, 1);
    verify_int("perturbations", &VerifyOptions::perturbations, 1);
    verify_int("bound_pairs", &VerifyOptions::bound_pairs, 1);
    verify_int("spectral_points", &VerifyOptions::spectral_points, 2);
    return k;
  }();
  return keys;
}

const std::vector<std::string>& sections() {
  static const std::vector<std::string> s{"estimators", "model", "estimate", "benchmark", "verify"};
  return s;
}

// sections whose keys matter for a command
bool relevant(Command c, const std::string& section) {
  if (section.empty()) return true;
  switch (c) {
    case Command::kSimulate: return section == "model";
    case Command::kEstimate: return section == "estimators" || section == "estimate";
    case Command::kBenchmark: return section == "estimators" || section == "benchmark";
    case Command::kVerify: return section == "verify";
  }
  return false;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError(what + ": file '" + path + "' does not exist");
  }
}

}  // namespace

Command parse_command(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "simulate") return Command::kSimulate;
  if (t == "estimate") return Command::kEstimate;
  if (t == "benchmark") return Command::kBenchmark;
  if (t == "verify") return Command::kVerify;
  throw ConfigError("unknown command '" + text + "' (expected simulate, estimate, benchmark or verify)");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::kSimulate: return "simulate";
    case Command::kEstimate: return "estimate";
    case Command::kBenchmark: return "benchmark";
    case Command::kVerify: return "verify";
  }
  return "?";
}

std::vector<EstimatorConfig> EstimatorOptions::build() const {
  std::vector<EstimatorConfig> out;
  std::set<std::string> seen;
  for (const auto& name : names) {
    EstimatorConfig c = parse_estimator_name(name);
    if (!seen.insert(c.name()).second) throw ConfigError("estimator '" + name + "' listed twice");
    c.grid_size = lambda_grid;
    c.grid_ratio = lambda_ratio;
    c.tuning.nu = eric_nu;
    c.threshold_rule = parse_threshold_rule(threshold_rule);
    c.threshold_multiplier = threshold_multiplier;
    c.reselect_lambda = reselect_lambda;
    c.cov_cv.splits = cv_splits;
    c.cov_cv.grid_size = cv_grid;
    c.validate();
    out.push_back(c);
  }
  return out;
}

std::vector<Scenario> BenchmarkSpec::scenarios(std::uint64_t seed) const {
  std::vector<Scenario> out;
  Scenario base;
  base.replications = replications;
  base.horizon = horizon;
  base.burn_in = burn_in;
  base.norm = norm;
  base.n_freq = n_freq;
  base.redraw = redraw;
  base.seed = seed;
  for (int nn : n) {
    base.n = nn;
    if (example == 1) {
      base.example1 = true;
      for (auto v : variants) {
        base.variant = v;
        out.push_back(base);
      }
    } else {
      base.example1 = false;
      for (int dd : d)
        for (int ss : s)
          for (double r : rho) {
            base.d = dd;
            base.s = ss;
            base.rho = r;
            out.push_back(base);
          }
    }
  }
  for (const auto& sc : out) sc.validate();
  return out;
}

std::vector<std::string> RunConfig::canonical() const {
  std::vector<std::string> out;
  for (const auto& k : registry()) {
    if (!k.canonical || !relevant(command, k.section)) continue;
    const std::string v = k.get(*this);
    if (!v.empty()) out.push_back(k.qualified() + " = " + v);
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& line : canonical()) text += line + '\n';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

Provenance RunConfig::provenance() const {
  return {std::string("sparsevar ") + kVersion, "command: " + command_name(command),
          "seed: " + (seed ? std::to_string(*seed) : std::string("none")),
          "config-hash: fnv1a64:" + hash()};
}

std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_prefix = SIZE_MAX, best_full = SIZE_MAX;
  for (const auto& c : candidates) {
    std::size_t prefix = SIZE_MAX;
    for (std::size_t len = 0; len <= c.size(); ++len) {
      prefix = std::min(prefix, edit_distance(key, c.substr(0, len)));
    }
    const std::size_t full = edit_distance(key, c);
    if (prefix < best_prefix || (prefix == best_prefix && full < best_full)) {
      best = c;
      best_prefix = prefix;
      best_full = full;
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, key.size() / 3);
  return best_prefix <= limit ? best : std::string();
}

RunConfig parse_config(const std::string& text, const std::string& origin,
                       const CliOverrides& overrides) {
  RunConfig cfg;
  std::optional<Command> file_command;
  std::map<std::string, int> seen;  // qualified key -> line
  std::map<std::string, int> section_line;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = lower(trim(line.substr(1, line.size() - 2)));
      section_line.emplace(section, line_no);
      if (std::find(sections().begin(), sections().end(), section) == sections().end()) {
        const std::string hint = suggest_key(section, sections());
        fail("unknown section [" + section + "]" +
             (hint.empty() ? std::string() : "; did you mean [" + hint + "]?"));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key before '='");

    const auto& keys = registry();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeyDef& k) {
      return k.section == section && k.name == key;
    });
    if (it == keys.end()) {
      std::vector<std::string> names;
      for (const auto& k : keys) names.push_back(k.name);
      std::string msg = "unknown key '" + key + "'" +
                        (section.empty() ? std::string() : " in [" + section + "]");
      const std::string hint = suggest_key(key, names);
      if (!hint.empty()) {
        const auto def = std::find_if(keys.begin(), keys.end(), [&](const KeyDef& k) {
          return k.name == hint && k.section == section;
        });
        const KeyDef& h = def != keys.end()
                              ? *def
                              : *std::find_if(keys.begin(), keys.end(),
                                              [&](const KeyDef& k) { return k.name == hint; });
        msg += "; did you mean '" + hint + "'" +
               (h.section == section ? std::string()
                                     : std::string(" in ") + (h.section.empty() ? "the top level" : "[" + h.section + "]")) +
               "?";
      }
      fail(msg);
    }
    const std::string q = it->qualified();
    if (const auto prev = seen.find(q); prev != seen.end()) {
      fail("duplicate key '" + q + "' (first set on line " + std::to_string(prev->second) + ")");
    }
    seen[q] = line_no;
    if (value.empty()) fail(q + ": missing value");
    it->set(cfg, value, Loc{&origin, line_no, q});
    if (q == "command") file_command = cfg.command;
  }

  if (overrides.command) {
    if (file_command && *file_command != *overrides.command) {
      throw ConfigError(origin + ": command '" + command_name(*file_command) +
                        "' in the file conflicts with '" + command_name(*overrides.command) +
                        "' on the command line");
    }
    cfg.command = *overrides.command;
  } else if (!file_command) {
    throw ConfigError(origin + ": no command given");
  }
  if (overrides.seed) cfg.seed = overrides.seed;
  if (overrides.threads) {
    if (*overrides.threads < 1) throw ConfigError("--threads must be at least 1");
    cfg.threads = *overrides.threads;
  }
  if (overrides.out) cfg.out = *overrides.out;

  const std::string cmd = command_name(cfg.command);
  if (cfg.command != Command::kVerify && !cfg.seed) {
    throw ConfigError(origin + ": seed is required for '" + cmd + "' (set seed = <u64> or pass --seed)");
  }
  if (cfg.seed && cfg.command == Command::kVerify) cfg.verify.seed = *cfg.seed;

  const auto wrap = [&](const std::string& section, auto&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      const auto it = section_line.find(section);
      const int line = it == section_line.end() ? 0 : it->second;
      throw ConfigError(origin + ":" + std::to_string(line) + ": [" + section + "] " + e.what());
    }
  };
  switch (cfg.command) {
    case Command::kSimulate:
      wrap("model", [&] {
        const ModelSpec& m = cfg.model;
        if (m.source == "file") {
          if (m.file.empty()) throw ConfigError("source = file requires 'file'");
          require_file(m.file, "file");
        } else if (m.source == "example2") {
          if (m.s > m.d) throw ConfigError("s must not exceed d");
          if (!(m.rho > 0.0 && m.rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
        }
      });
      break;
    case Command::kEstimate:
      wrap("estimate", [&] {
        if (cfg.estimate.series.empty()) throw ConfigError("'series' is required");
        require_file(cfg.estimate.series, "series");
        if (!cfg.estimate.truth.empty()) require_file(cfg.estimate.truth, "truth");
      });
      wrap("estimators", [&] {
        if (cfg.estimators.names.size() != 1) {
          throw ConfigError("estimate takes exactly one estimator in 'names'");
        }
        cfg.estimators.build();
      });
      break;
    case Command::kBenchmark:
      wrap("estimators", [&] { cfg.estimators.build(); });
      wrap("benchmark", [&] { cfg.benchmark.scenarios(*cfg.seed); });
      break;
    case Command::kVerify:
      break;
  }
  return cfg;
}

}  // namespace sparsevar
