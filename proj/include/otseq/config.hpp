/**
 * @file config.hpp
 * @brief Run configuration: defaults, config-file and flag parsing with
 *        per-key provenance.
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "otseq/seqdist.hpp"
#include "otseq/serialize.hpp"
#include "otseq/synthgen.hpp"
#include "otseq/train.hpp"

namespace otseq {

enum class Provenance { kDefault, kFile, kFlag };

std::string provenance_name(Provenance p);

/**
 * Fully resolved run description. Every field starts from a documented
 * default; config-file entries override defaults and command-line flags
 * override both. The provenance map records where each key's effective
 * value came from.
 */
struct RunConfig {
  std::string command;  // solve | dist | bench | train | sweep

  // run.*
  std::uint64_t seed = 0;
  std::string output_path;  // default: $OTSEQ_OUTPUT_DIR (or .) / otseq_<command>
  std::vector<std::string> metrics = {"cmot", "agg", "dtw"};
  int episode_count = 1000;
  double max_nonconverged_fraction = 0.01;

  // episode.*
  int n_way = 5;
  int k_shot = 1;
  int q_per_class = 1;

  // generator.*
  GeneratorConfig generator;

  // fusion.* / positional.* / sinkhorn.*
  DistanceConfig distance;

  // train.*
  TrainConfig train;
  int train_d_out = 0;  // 0 keeps the generator dimension

  // sweep.*
  std::string sweep_parameter = "alpha";
  std::vector<double> sweep_values = {0.0, 0.2, 0.4, 0.8, 1.6};

  // command inputs
  std::string solve_cost_path;
  std::string dist_a_path;
  std::string dist_b_path;

  std::map<std::string, Provenance> provenance;  // per dotted key
};

/// Names of every recognized dotted key, in registry order.
std::vector<std::string> config_key_names();

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/**
 * Resolves a full RunConfig from defaults, file entries, and flag entries
 * (in that precedence order). Unknown keys are fatal and the error message
 * names the closest recognized key. Values that fail to parse, violate a
 * bound, or leave the episode shape inconsistent with the generator's label
 * space are also fatal.
 */
RunConfig parse_config(const std::string& command,
                       const std::vector<std::pair<std::string, std::string>>& file_entries,
                       const std::vector<std::pair<std::string, std::string>>& flag_entries);

/// Effective value of every key plus its provenance, as one JSON object.
Json config_snapshot(const RunConfig& cfg);

/// Edit distance used for the unknown-key suggestions; exposed for tests.
int edit_distance(const std::string& a, const std::string& b);

}  // namespace otseq
