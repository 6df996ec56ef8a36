/**
 * @file serialize.hpp
 * @brief JSON layouts for sequences, class banks, and episodes.
 */

#pragma once

#include "json.hpp"
#include "otseq/fewshot.hpp"
#include "otseq/synthgen.hpp"
#include "otseq/types.hpp"

namespace otseq {

using Json = nlohmann::json;

// Sequences serialize as {"segments": [[...], ...]}, row per segment.
Json sequence_to_json(const SegmentSequence& s);
SegmentSequence sequence_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// Banks carry their seed and per-class prototype tuples.
Json bank_to_json(const ClassBank& bank);
ClassBank bank_from_json(const Json& j);

// Episodes carry the shape counters plus labeled support/query lists.
Json episode_to_json(const Episode& episode);
Episode episode_from_json(const Json& j);

}  // namespace otseq
