/**
 * @file config.cpp
 * @brief Config resolution with provenance.
 */

#include "otseq/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace otseq {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    items.push_back(trim(item));
  }
  return items;
}

[[noreturn]] void bad_value(const std::string& key, const char* expected,
                            const std::string& value) {
  throw std::invalid_argument(key + ": expected " + expected + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) {
      bad_value(key, "a number", value);
    }
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, "a number", value);
  } catch (const std::out_of_range&) {
    bad_value(key, "a representable number", value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) {
      bad_value(key, "an integer", value);
    }
    return parsed;
  } catch (const std::invalid_argument&) {
    bad_value(key, "an integer", value);
  } catch (const std::out_of_range&) {
    bad_value(key, "a representable integer", value);
  }
}

int parse_bounded_int(const std::string& key, const std::string& value, long long low,
                      long long high = std::numeric_limits<int>::max()) {
  const long long parsed = parse_int(key, value);
  if (parsed < low || parsed > high) {
    std::ostringstream expected;
    if (high == std::numeric_limits<int>::max()) {
      expected << "an integer >= " << low;
    } else {
      expected << "an integer in [" << low << ", " << high << "]";
    }
    bad_value(key, expected.str().c_str(), value);
  }
  return static_cast<int>(parsed);
}

double parse_bounded_double(const std::string& key, const std::string& value, double low,
                            bool low_exclusive,
                            double high = std::numeric_limits<double>::infinity()) {
  const double parsed = parse_double(key, value);
  const bool above = low_exclusive ? parsed > low : parsed >= low;
  if (!std::isfinite(parsed) || !above || parsed > high) {
    std::ostringstream expected;
    expected << "a number " << (low_exclusive ? "> " : ">= ") << low;
    if (std::isfinite(high)) {
      expected << " and <= " << high;
    }
    bad_value(key, expected.str().c_str(), value);
  }
  return parsed;
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> apply;
  std::function<Json(const RunConfig&)> snapshot;
};

std::string format_multiplier(double multiplier) {
  char text[64];
  std::snprintf(text, sizeof text, "auto(%g/med)", multiplier);
  return text;
}

const std::vector<KeySpec>& registry() {
  static const std::vector<KeySpec> keys = {
      {"run.seed",
       [](RunConfig& cfg, const std::string& v) {
         // stoull wraps negative input silently, so screen the sign first.
         if (v.empty() || v[0] == '-') {
           bad_value("run.seed", "a non-negative integer", v);
         }
         try {
           size_t used = 0;
           cfg.seed = std::stoull(v, &used);
           if (used != v.size()) {
             bad_value("run.seed", "a non-negative integer", v);
           }
         } catch (const std::logic_error&) {
           bad_value("run.seed", "a non-negative integer", v);
         }
       },
       [](const RunConfig& cfg) { return Json(cfg.seed); }},
      {"run.output_path",
       [](RunConfig& cfg, const std::string& v) {
         if (v.empty()) {
           bad_value("run.output_path", "a non-empty path", v);
         }
         cfg.output_path = v;
       },
       [](const RunConfig& cfg) { return Json(cfg.output_path); }},
      {"run.metrics",
       [](RunConfig& cfg, const std::string& v) {
         std::vector<std::string> metrics = split_list(v);
         if (metrics.empty()) {
           bad_value("run.metrics", "a comma-separated subset of cmot,agg,dtw", v);
         }
         for (const std::string& metric : metrics) {
           if (metric != "cmot" && metric != "agg" && metric != "dtw") {
             bad_value("run.metrics", "a comma-separated subset of cmot,agg,dtw", v);
           }
           if (std::count(metrics.begin(), metrics.end(), metric) > 1) {
             bad_value("run.metrics", "distinct metric names", v);
           }
         }
         cfg.metrics = std::move(metrics);
       },
       [](const RunConfig& cfg) { return Json(cfg.metrics); }},
      {"run.episode_count",
       [](RunConfig& cfg, const std::string& v) {
         cfg.episode_count = parse_bounded_int("run.episode_count", v, 2);
       },
       [](const RunConfig& cfg) { return Json(cfg.episode_count); }},
      {"run.max_nonconverged_fraction",
       [](RunConfig& cfg, const std::string& v) {
         cfg.max_nonconverged_fraction =
             parse_bounded_double("run.max_nonconverged_fraction", v, 0.0, false, 1.0);
       },
       [](const RunConfig& cfg) { return Json(cfg.max_nonconverged_fraction); }},
      {"episode.n_way",
       [](RunConfig& cfg, const std::string& v) {
         cfg.n_way = parse_bounded_int("episode.n_way", v, 2);
       },
       [](const RunConfig& cfg) { return Json(cfg.n_way); }},
      {"episode.k_shot",
       [](RunConfig& cfg, const std::string& v) {
         cfg.k_shot = parse_bounded_int("episode.k_shot", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.k_shot); }},
      {"episode.q_per_class",
       [](RunConfig& cfg, const std::string& v) {
         cfg.q_per_class = parse_bounded_int("episode.q_per_class", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.q_per_class); }},
      {"generator.n_classes",
       [](RunConfig& cfg, const std::string& v) {
         cfg.generator.n_classes = parse_bounded_int("generator.n_classes", v, 2);
       },
       [](const RunConfig& cfg) { return Json(cfg.generator.n_classes); }},
      {"generator.m_segments",
       [](RunConfig& cfg, const std::string& v) {
         cfg.generator.m_segments = parse_bounded_int("generator.m_segments", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.generator.m_segments); }},
      {"generator.dim",
       [](RunConfig& cfg, const std::string& v) {
         cfg.generator.dim = parse_bounded_int("generator.dim", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.generator.dim); }},
      {"generator.noise_sigma",
       [](RunConfig& cfg, const std::string& v) {
         cfg.generator.noise_sigma =
             parse_bounded_double("generator.noise_sigma", v, 0.0, false);
       },
       [](const RunConfig& cfg) { return Json(cfg.generator.noise_sigma); }},
      {"generator.regime",
       [](RunConfig& cfg, const std::string& v) {
         if (v == "content") {
           cfg.generator.regime = Regime::kContentDominated;
         } else if (v == "ordering") {
           cfg.generator.regime = Regime::kOrderingDominated;
         } else {
           bad_value("generator.regime", "content or ordering", v);
         }
       },
       [](const RunConfig& cfg) {
         return Json(cfg.generator.regime == Regime::kContentDominated ? "content"
                                                                       : "ordering");
       }},
      {"fusion.alpha",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.fusion.alpha = parse_bounded_double("fusion.alpha", v, 0.0, false);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.fusion.alpha); }},
      {"positional.sigma",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.positional.sigma = parse_bounded_double("positional.sigma", v, 0.0, true);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.positional.sigma); }},
      {"positional.variant",
       [](RunConfig& cfg, const std::string& v) {
         if (v == "offset") {
           cfg.distance.positional.variant = PositionalVariant::kNormalizedOffset;
         } else if (v == "uniform") {
           cfg.distance.positional.variant = PositionalVariant::kUniformPe;
         } else if (v == "sinusoid") {
           cfg.distance.positional.variant = PositionalVariant::kSinusoidPe;
         } else {
           bad_value("positional.variant", "offset, uniform, or sinusoid", v);
         }
       },
       [](const RunConfig& cfg) {
         switch (cfg.distance.positional.variant) {
           case PositionalVariant::kNormalizedOffset:
             return Json("offset");
           case PositionalVariant::kUniformPe:
             return Json("uniform");
           default:
             return Json("sinusoid");
         }
       }},
      {"positional.pe_dimension",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.positional.pe_dimension =
             parse_bounded_int("positional.pe_dimension", v, 0);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.positional.pe_dimension); }},
      {"sinkhorn.lambda",
       [](RunConfig& cfg, const std::string& v) {
         if (v == "auto") {
           cfg.distance.lambda_auto = true;
         } else {
           cfg.distance.lambda_auto = false;
           cfg.distance.sinkhorn.lambda = parse_bounded_double("sinkhorn.lambda", v, 0.0, true);
         }
       },
       [](const RunConfig& cfg) {
         return cfg.distance.lambda_auto
                    ? Json(format_multiplier(cfg.distance.lambda_multiplier))
                    : Json(cfg.distance.sinkhorn.lambda);
       }},
      {"sinkhorn.lambda_multiplier",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.lambda_multiplier =
             parse_bounded_double("sinkhorn.lambda_multiplier", v, 0.0, true);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.lambda_multiplier); }},
      {"sinkhorn.max_iterations",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.sinkhorn.max_iterations =
             parse_bounded_int("sinkhorn.max_iterations", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.sinkhorn.max_iterations); }},
      {"sinkhorn.residual_tolerance",
       [](RunConfig& cfg, const std::string& v) {
         cfg.distance.sinkhorn.residual_tolerance =
             parse_bounded_double("sinkhorn.residual_tolerance", v, 0.0, true);
       },
       [](const RunConfig& cfg) { return Json(cfg.distance.sinkhorn.residual_tolerance); }},
      {"train.learning_rate",
       [](RunConfig& cfg, const std::string& v) {
         cfg.train.learning_rate = parse_bounded_double("train.learning_rate", v, 0.0, false);
       },
       [](const RunConfig& cfg) { return Json(cfg.train.learning_rate); }},
      {"train.decay_factor",
       [](RunConfig& cfg, const std::string& v) {
         cfg.train.decay_factor =
             parse_bounded_double("train.decay_factor", v, 0.0, true, 1.0);
       },
       [](const RunConfig& cfg) { return Json(cfg.train.decay_factor); }},
      {"train.decay_every",
       [](RunConfig& cfg, const std::string& v) {
         cfg.train.decay_every = parse_bounded_int("train.decay_every", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.train.decay_every); }},
      {"train.total_episodes",
       [](RunConfig& cfg, const std::string& v) {
         cfg.train.total_episodes = parse_bounded_int("train.total_episodes", v, 1);
       },
       [](const RunConfig& cfg) { return Json(cfg.train.total_episodes); }},
      {"train.d_out",
       [](RunConfig& cfg, const std::string& v) {
         cfg.train_d_out = parse_bounded_int("train.d_out", v, 0);
       },
       [](const RunConfig& cfg) { return Json(cfg.train_d_out); }},
      {"sweep.parameter",
       [](RunConfig& cfg, const std::string& v) {
         if (v != "alpha" && v != "sigma" && v != "lambda_multiplier") {
           bad_value("sweep.parameter", "alpha, sigma, or lambda_multiplier", v);
         }
         cfg.sweep_parameter = v;
       },
       [](const RunConfig& cfg) { return Json(cfg.sweep_parameter); }},
      {"sweep.values",
       [](RunConfig& cfg, const std::string& v) {
         const std::vector<std::string> items = split_list(v);
         if (items.empty()) {
           bad_value("sweep.values", "a comma-separated list of numbers", v);
         }
         std::vector<double> values;
         values.reserve(items.size());
         for (const std::string& item : items) {
           values.push_back(parse_double("sweep.values", item));
         }
         cfg.sweep_values = std::move(values);
       },
       [](const RunConfig& cfg) { return Json(cfg.sweep_values); }},
      {"solve.cost_path",
       [](RunConfig& cfg, const std::string& v) { cfg.solve_cost_path = v; },
       [](const RunConfig& cfg) { return Json(cfg.solve_cost_path); }},
      {"dist.a_path", [](RunConfig& cfg, const std::string& v) { cfg.dist_a_path = v; },
       [](const RunConfig& cfg) { return Json(cfg.dist_a_path); }},
      {"dist.b_path", [](RunConfig& cfg, const std::string& v) { cfg.dist_b_path = v; },
       [](const RunConfig& cfg) { return Json(cfg.dist_b_path); }},
  };
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& spec : registry()) {
    if (spec.name == name) {
      return &spec;
    }
  }
  return nullptr;
}

std::string nearest_key(const std::string& name) {
  int best = std::numeric_limits<int>::max();
  std::string suggestion;
  for (const KeySpec& spec : registry()) {
    const int distance = edit_distance(name, spec.name);
    if (distance < best) {
      best = distance;
      suggestion = spec.name;
    }
  }
  return suggestion;
}

void apply_entries(RunConfig& cfg,
                   const std::vector<std::pair<std::string, std::string>>& entries,
                   Provenance source) {
  for (const auto& [key, value] : entries) {
    const KeySpec* spec = find_key(key);
    if (spec == nullptr) {
      throw std::invalid_argument("unknown key '" + key + "' (did you mean '" +
                                  nearest_key(key) + "'?)");
    }
    spec->apply(cfg, value);
    cfg.provenance[key] = source;
  }
}

void cross_validate(const RunConfig& cfg) {
  const int labels =
      (cfg.generator.regime == Regime::kOrderingDominated ? 2 : 1) * cfg.generator.n_classes;
  if (cfg.n_way > labels) {
    std::ostringstream message;
    message << "episode.n_way = " << cfg.n_way << " exceeds the " << labels
            << " labels available from generator.n_classes = " << cfg.generator.n_classes
            << " under the "
            << (cfg.generator.regime == Regime::kOrderingDominated ? "ordering" : "content")
            << " regime";
    throw std::invalid_argument(message.str());
  }
  if (cfg.command == "solve" && cfg.solve_cost_path.empty()) {
    throw std::invalid_argument("solve requires solve.cost_path");
  }
  if (cfg.command == "dist" && (cfg.dist_a_path.empty() || cfg.dist_b_path.empty())) {
    throw std::invalid_argument("dist requires dist.a_path and dist.b_path");
  }
  const bool zero_ok = cfg.sweep_parameter == "alpha";
  for (const double value : cfg.sweep_values) {
    if (!std::isfinite(value) || (zero_ok ? value < 0.0 : value <= 0.0)) {
      throw std::invalid_argument("sweep.values: " + cfg.sweep_parameter + " requires finite values " +
                                  (zero_ok ? ">= 0" : "> 0"));
    }
  }
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kDefault:
      return "default";
    case Provenance::kFile:
      return "file";
    default:
      return "flag";
  }
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> previous(b.size() + 1);
  std::vector<int> current(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) {
    previous[j] = static_cast<int>(j);
  }
  for (size_t i = 1; i <= a.size(); ++i) {
    current[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

std::vector<std::string> config_key_names() {
  std::vector<std::string> names;
  names.reserve(registry().size());
  for (const KeySpec& spec : registry()) {
    names.push_back(spec.name);
  }
  return names;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::stringstream stream(text);
  std::string line;
  int number = 0;
  while (std::getline(stream, line)) {
    ++number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

RunConfig parse_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& file_entries,
                       const std::vector<std::pair<std::string, std::string>>& flag_entries) {
  static const std::vector<std::string> commands = {"solve", "dist", "bench", "train", "sweep"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    int best = std::numeric_limits<int>::max();
    std::string suggestion;
    for (const std::string& known : commands) {
      const int distance = edit_distance(command, known);
      if (distance < best) {
        best = distance;
        suggestion = known;
      }
    }
    throw std::invalid_argument("unknown command '" + command + "' (did you mean '" +
                                suggestion + "'?)");
  }

  RunConfig cfg;
  cfg.command = command;
  const char* base = std::getenv("OTSEQ_OUTPUT_DIR");
  cfg.output_path = std::string(base != nullptr && base[0] != '\0' ? base : ".") + "/otseq_" +
                    command;
  for (const KeySpec& spec : registry()) {
    cfg.provenance[spec.name] = Provenance::kDefault;
  }
  apply_entries(cfg, file_entries, Provenance::kFile);
  apply_entries(cfg, flag_entries, Provenance::kFlag);
  cross_validate(cfg);
  return cfg;
}

Json config_snapshot(const RunConfig& cfg) {
  Json keys = Json::object();
  for (const KeySpec& spec : registry()) {
    keys[spec.name] = Json{{"value", spec.snapshot(cfg)},
                           {"source", provenance_name(cfg.provenance.at(spec.name))}};
  }
  return Json{{"command", cfg.command}, {"keys", std::move(keys)}};
}

}  // namespace otseq
