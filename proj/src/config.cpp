#include "echotdoa/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace echotdoa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    }
    if (i > start) {
      out.push_back(s.substr(start, i - start));
    }
  }
  return out;
}

struct LineContext {
  std::string_view origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ": " +
                      what);
  }
};

double parse_double(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    ctx.fail("expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    ctx.fail("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    ctx.fail("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_on_off(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  if (s == "on" || s == "true" || s == "1") {
    return true;
  }
  if (s == "off" || s == "false" || s == "0") {
    return false;
  }
  ctx.fail("expected on or off, got '" + std::string(s) + "'");
}

ExperimentMode parse_mode(std::string_view s, const LineContext& ctx) {
  s = trim(s);
  if (s == "tdoa2") {
    return ExperimentMode::tdoa_2anchor;
  }
  if (s == "pos3") {
    return ExperimentMode::position_3anchor;
  }
  ctx.fail("expected mode tdoa2 or pos3, got '" + std::string(s) + "'");
}

std::vector<double> default_latencies(double period_s) {
  std::vector<double> out;
  const double step = 0.0005;
  auto n = static_cast<int>(std::floor(period_s / step + 0.5));
  out.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    double t = i * step;
    if (t <= period_s + 1e-12) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<Anchor> default_anchors(ExperimentMode mode) {
  Point3 up{0.0, 1.0, 0.0};
  if (mode == ExperimentMode::tdoa_2anchor) {
    return {{1, {-0.5, 0.0, 0.0}, up}, {2, {0.5, 0.0, 0.0}, up}};
  }
  return {{1, {-1.0, 0.0, 0.0}, up},
          {2, {0.0, 0.0, 0.0}, up},
          {3, {1.0, 0.0, 0.0}, up}};
}

// "x y" or "x y bx by" per anchor, comma separated; ids run 1..N.
std::vector<Anchor> parse_anchors(std::string_view value,
                                  const LineContext& ctx) {
  std::vector<Anchor> out;
  int id = 1;
  for (std::string_view group : split(value, ',')) {
    auto parts = split_ws(group);
    if (parts.size() != 2 && parts.size() != 4) {
      ctx.fail("each anchor needs 'x y' or 'x y bx by', got '" +
               std::string(group) + "'");
    }
    Anchor a;
    a.id = id++;
    a.position = {parse_double(parts[0], ctx), parse_double(parts[1], ctx),
                  0.0};
    if (parts.size() == 4) {
      Point3 b{parse_double(parts[2], ctx), parse_double(parts[3], ctx), 0.0};
      double n = norm(b);
      if (n == 0.0) {
        ctx.fail("anchor boresight must be non-zero");
      }
      a.boresight = (1.0 / n) * b;
    }
    out.push_back(a);
  }
  if (out.empty()) {
    ctx.fail("anchors list is empty");
  }
  return out;
}

std::vector<std::pair<double, double>> parse_directivity(
    std::string_view value, const LineContext& ctx) {
  std::vector<std::pair<double, double>> out;
  for (std::string_view entry : split(value, ',')) {
    auto parts = split(entry, ':');
    if (parts.size() != 2) {
      ctx.fail("each directivity entry needs 'deg:db', got '" +
               std::string(entry) + "'");
    }
    out.emplace_back(parse_double(parts[0], ctx), parse_double(parts[1], ctx));
  }
  return out;
}

// Either "start:step:stop" or a comma-separated list of values.
std::vector<double> parse_latencies(std::string_view value,
                                    const LineContext& ctx) {
  value = trim(value);
  if (value.find(':') != std::string_view::npos) {
    auto parts = split(value, ':');
    if (parts.size() != 3) {
      ctx.fail("a latency range needs 'start:step:stop'");
    }
    double start = parse_double(parts[0], ctx);
    double step = parse_double(parts[1], ctx);
    double stop = parse_double(parts[2], ctx);
    if (!(step > 0.0) || stop < start) {
      ctx.fail("latency range must have a positive step and stop >= start");
    }
    std::vector<double> out;
    auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
      out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
  }
  std::vector<double> out;
  for (std::string_view entry : split(value, ',')) {
    out.push_back(parse_double(entry, ctx));
  }
  return out;
}

struct ParseState {
  ExperimentConfig config;
  bool anchors_explicit = false;
  bool latencies_explicit = false;
};

void apply_key(ParseState& state, std::string_view section,
               std::string_view key, std::string_view value,
               const LineContext& ctx) {
  ExperimentConfig& c = state.config;
  if (section == "scene") {
    if (key == "anchors") {
      c.scene.anchors = parse_anchors(value, ctx);
      state.anchors_explicit = true;
    } else if (key == "v") {
      c.scene.speed_of_sound = parse_double(value, ctx);
    } else {
      ctx.fail("unknown key '" + std::string(key) + "' in section [scene]");
    }
  } else if (section == "signal") {
    if (key == "f0_hz") {
      c.chirp.f0_hz = parse_double(value, ctx);
    } else if (key == "f1_hz") {
      c.chirp.f1_hz = parse_double(value, ctx);
    } else if (key == "period_s") {
      c.chirp.period_s = parse_double(value, ctx);
    } else if (key == "amplitude") {
      c.chirp.amplitude = parse_double(value, ctx);
    } else {
      ctx.fail("unknown key '" + std::string(key) + "' in section [signal]");
    }
  } else if (section == "channel") {
    if (key == "sample_rate_hz") {
      c.sample_rate_hz = parse_double(value, ctx);
    } else if (key == "sigma") {
      c.sigma = parse_double(value, ctx);
    } else if (key == "reference_gain_m") {
      c.attenuation.reference_gain_m = parse_double(value, ctx);
    } else if (key == "absorption_db_per_m") {
      c.attenuation.absorption_db_per_m = parse_double(value, ctx);
    } else if (key == "directivity_db") {
      c.attenuation.directivity_db = parse_directivity(value, ctx);
    } else if (key == "jitter_s") {
      c.per_anchor_jitter_s = parse_double(value, ctx);
    } else {
      ctx.fail("unknown key '" + std::string(key) + "' in section [channel]");
    }
  } else if (section == "experiment") {
    if (key == "mode") {
      c.mode = parse_mode(value, ctx);
    } else if (key == "area") {
      auto parts = split_ws(value);
      if (parts.size() != 4) {
        ctx.fail("area needs 'xmin xmax ymin ymax'");
      }
      c.area = {parse_double(parts[0], ctx), parse_double(parts[1], ctx),
                parse_double(parts[2], ctx), parse_double(parts[3], ctx)};
    } else if (key == "pitch_m") {
      c.pitch_m = parse_double(value, ctx);
    } else if (key == "latencies_s") {
      c.latencies_s = parse_latencies(value, ctx);
      state.latencies_explicit = true;
    } else if (key == "heuristic") {
      c.heuristic_on = parse_on_off(value, ctx);
    } else if (key == "margin_m") {
      c.margin_m = parse_double(value, ctx);
    } else if (key == "position_error_threshold_m") {
      c.position_error_threshold_m = parse_double(value, ctx);
    } else if (key == "tdoa_error_threshold_s") {
      c.tdoa_error_threshold_s = parse_double(value, ctx);
    } else if (key == "seed") {
      c.master_seed = parse_u64(value, ctx);
    } else if (key == "threads") {
      c.threads = parse_int(value, ctx);
    } else {
      ctx.fail("unknown key '" + std::string(key) + "' in section [experiment]");
    }
  } else {
    ctx.fail("unknown section [" + std::string(section) + "]");
  }
}

}  // namespace

ExperimentConfig default_experiment_config() {
  ExperimentConfig c;
  c.scene.anchors = default_anchors(c.mode);
  c.latencies_s = default_latencies(c.chirp.period_s);
  return c;
}

ExperimentConfig parse_config_text(std::string_view text,
                                   std::string_view origin,
                                   const CliOverrides& overrides) {
  ParseState state;
  state.config = default_experiment_config();

  std::string section;
  LineContext ctx{origin, 0};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++ctx.line;

    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        ctx.fail("unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "scene" && section != "signal" && section != "channel" &&
          section != "experiment") {
        ctx.fail("unknown section [" + section + "]");
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      ctx.fail("expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      ctx.fail("empty key");
    }
    if (section.empty()) {
      ctx.fail("key '" + std::string(key) + "' appears before any section");
    }
    apply_key(state, section, key, value, ctx);
  }

  ExperimentConfig& c = state.config;
  if (overrides.sigma) {
    c.sigma = *overrides.sigma;
  }
  if (overrides.pitch_m) {
    c.pitch_m = *overrides.pitch_m;
  }
  if (overrides.seed) {
    c.master_seed = *overrides.seed;
  }
  if (overrides.heuristic_on) {
    c.heuristic_on = *overrides.heuristic_on;
  }
  if (overrides.mode) {
    c.mode = *overrides.mode;
  }
  if (overrides.threads) {
    c.threads = *overrides.threads;
  }
  // Anchors and latencies follow the final mode and chirp period unless
  // the file pinned them explicitly.
  if (!state.anchors_explicit) {
    c.scene.anchors = default_anchors(c.mode);
  }
  if (!state.latencies_explicit && c.chirp.period_s > 0.0) {
    c.latencies_s = default_latencies(c.chirp.period_s);
  }
  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const CliOverrides& overrides) {
  if (!file) {
    return parse_config_text("", "<defaults>", overrides);
  }
  std::ifstream in(*file);
  if (!in) {
    throw ConfigError("cannot open config file '" + file->string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), file->string(), overrides);
}

void validate_config(const ExperimentConfig& config) {
  try {
    config.chirp.validate();
    config.attenuation.validate();
    config.scene.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (config.sample_rate_hz < 2.0 * config.chirp.f1_hz) {
    throw ConfigError("sample rate is below the Nyquist rate of the chirp");
  }
  if (config.sigma < 0.0) {
    throw ConfigError("sigma must be non-negative");
  }
  if (config.per_anchor_jitter_s < 0.0) {
    throw ConfigError("jitter must be non-negative");
  }
  if (!(config.pitch_m > 0.0)) {
    throw ConfigError("pitch must be positive");
  }
  if (config.area.x_max < config.area.x_min ||
      config.area.y_max < config.area.y_min) {
    throw ConfigError("area must satisfy xmax >= xmin and ymax >= ymin");
  }
  if (!(config.position_error_threshold_m > 0.0) ||
      !(config.tdoa_error_threshold_s > 0.0)) {
    throw ConfigError("error thresholds must be positive");
  }
  if (config.margin_m < 0.0) {
    throw ConfigError("margin must be non-negative");
  }
  if (config.latencies_s.empty()) {
    throw ConfigError("latency list must not be empty");
  }
  for (double t : config.latencies_s) {
    if (t < 0.0) {
      throw ConfigError("latencies must be non-negative");
    }
  }
  std::size_t needed =
      config.mode == ExperimentMode::tdoa_2anchor ? 2 : 3;
  if (config.scene.anchors.size() < needed) {
    throw ConfigError("mode needs at least " + std::to_string(needed) +
                      " anchors");
  }
  if (config.mode == ExperimentMode::position_3anchor) {
    for (std::size_t i = 0; i < 3; ++i) {
      const Point3& p = config.scene.anchors[i].position;
      if (std::abs(p.y) > 1e-9 || std::abs(p.z) > 1e-9) {
        throw ConfigError(
            "position mode needs its first three anchors on the x axis");
      }
    }
  }
  if (config.heuristic_on) {
    // Wrap correction must be decidable for every anchor paired with
    // the reference.
    double wrap = config.scene.speed_of_sound * config.chirp.period_s;
    const Point3& ref = config.scene.anchors[0].position;
    for (std::size_t i = 1; i < needed; ++i) {
      double dist = range(config.scene.anchors[i].position, ref);
      if (!(wrap > 2.0 * (dist + config.margin_m))) {
        throw ConfigError(
            "chirp period too short to disambiguate the wrap for anchor " +
            std::to_string(config.scene.anchors[i].id));
      }
    }
  }
}

}  // namespace echotdoa
