#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rksat/counter.hpp"
#include "rksat/formula.hpp"
#include "rksat/rational.hpp"

namespace rksat {

/// Every knob of a run. Serializes to JSON and back; the hash of the
/// serialized form tags every report. `threads` is deliberately excluded.
struct RunConfig {
  // Generation parameters, used when no input file is given.
  std::optional<int> k;
  std::optional<Var> n;
  std::optional<std::size_t> m;
  std::optional<Rational> alpha;  // m = floor(alpha n)
  std::uint64_t seed = 0;

  Rational eps = make_rational(1, 5);
  std::string delta = "default";     // integer | "default" | "paper"
  std::string L = "infinite";        // integer | "infinite" | "paper"
  std::size_t c0 = 1;
  std::string s = "paper-capped";    // rational | "paper-capped" | "paper"
  Rational bad_fraction = make_rational(1, 10);
  std::string bisect = "geometric";  // geometric | paper
  std::string lp = "exact";          // exact | float

  std::size_t node_cap = 200000;
  std::size_t component_cap = 25;
  std::size_t enumeration_cap = 24;
  std::size_t lp_size_cap = 400;
  std::size_t marking_retries = 16;
  std::string format = "text";  // text | json

  std::size_t threads = 1;

  /// Throws InvalidArgument on unknown or inconsistent values.
  void validate() const;
  /// m from m or floor(alpha n); nullopt if neither is set.
  std::optional<std::size_t> clause_count() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
/// First 16 hex digits of SHA-256 over the canonical JSON form.
std::string config_hash(const RunConfig& config);

/// Constants a run actually uses once "paper" and "default" are resolved.
struct ResolvedConstants {
  std::uint32_t delta = 0;
  std::uint32_t paper_delta = 0;  // ceil(2^{k/300})
  Depth L;
  std::optional<std::size_t> paper_L;
  Rational s;
  double paper_s = 0.0;  // 2^{k/4} / (e k Delta), uncapped
  std::vector<std::string> notes;  // floors and caps that replaced a paper value
};

ResolvedConstants resolve_constants(const RunConfig& config, int k, Var n);

/// ApproxConfig / EstimateOptions / TreeOptions filled from a run config.
ApproxConfig approx_config(const RunConfig& config, const ResolvedConstants& constants);

}  // namespace rksat
