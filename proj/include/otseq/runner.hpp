/**
 * @file runner.hpp
 * @brief Experiment driver behind the CLI: runs the configured command and
 *        writes CSV/JSON outputs.
 */

#pragma once

#include <string>
#include <vector>

#include "otseq/config.hpp"
#include "otseq/serialize.hpp"

namespace otseq {

// One benchmark-style output row. Sweep points and train phases qualify the
// metric name, e.g. "cmot[alpha=0.8]" or "cmot[post]".
struct ReportRow {
  std::string metric;
  std::string regime;
  int n_way = 0;
  int k_shot = 0;
  int episodes = 0;
  double accuracy = 0.0;
  double ci95 = 0.0;
  std::uint64_t seed = 0;
};

/// CSV text for the rows: fixed header, 6 significant digits on the numerics.
std::string csv_text(const std::vector<ReportRow>& rows);

/// Text heatmap of a transport plan, one string per row, entries mapped onto
/// the " .:-=+*#%@" ramp by their fraction of the largest entry.
std::vector<std::string> plan_heatmap(const Matrix& plan);

/**
 * Runs the configured experiment and writes <output_path>.json (all commands)
 * plus <output_path>.csv (bench, sweep, train). Outputs are byte-identical
 * across reruns with the same config and seed.
 *
 * Returns 0 on success or 3 when the fraction of transport solves that hit
 * the iteration budget exceeds run.max_nonconverged_fraction. File and parse
 * problems throw.
 */
int run_experiment(const RunConfig& cfg);

}  // namespace otseq
