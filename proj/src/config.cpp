#include "rksat/config.hpp"

#include <cmath>
#include <cstdio>

#include <openssl/sha.h>

#include "rksat/classify.hpp"
#include "rksat/errors.hpp"

namespace rksat {

namespace {

bool is_unsigned(const std::string& text) {
  return !text.empty() && text.find_first_not_of("0123456789") == std::string::npos;
}

std::uint64_t parse_unsigned(const std::string& text, const char* what) {
  if (!is_unsigned(text) || text.size() > 18)
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a nonnegative integer, got '" + text + "'");
  return std::stoull(text);
}

void require_one_of(const std::string& value, std::initializer_list<const char*> options, const char* what) {
  for (const char* o : options)
    if (value == o) return;
  throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (eps <= 0) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  if (bad_fraction <= 0 || bad_fraction > 1)
    throw Error(ErrorKind::InvalidArgument, "bad fraction must lie in (0, 1]");
  if (k && (*k < 1 || *k > 62)) throw Error(ErrorKind::InvalidArgument, "k must lie in 1..62");
  if (n && *n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (alpha && *alpha < 0) throw Error(ErrorKind::InvalidArgument, "alpha must be nonnegative");
  if (m && alpha && n && *m != *clause_count())
    throw Error(ErrorKind::InvalidArgument, "m disagrees with floor(alpha n)");
  if (delta != "default" && delta != "paper" && parse_unsigned(delta, "Delta") < 1)
    throw Error(ErrorKind::InvalidArgument, "Delta must be at least 1");
  if (L != "infinite" && L != "paper") parse_unsigned(L, "L");
  if (c0 == 0) throw Error(ErrorKind::InvalidArgument, "C0 must be positive");
  if (s != "paper-capped" && s != "paper" && parse_rational(s) <= 0)
    throw Error(ErrorKind::InvalidArgument, "s must be positive");
  require_one_of(bisect, {"geometric", "paper"}, "bisect mode");
  require_one_of(lp, {"exact", "float"}, "LP mode");
  require_one_of(format, {"text", "json"}, "format");
  if (threads == 0) throw Error(ErrorKind::InvalidArgument, "threads must be positive");
}

std::optional<std::size_t> RunConfig::clause_count() const {
  if (alpha && n) {
    const Rational product = *alpha * Rational(Integer(*n));
    return static_cast<std::size_t>(Integer(boost::multiprecision::numerator(product) /
                                            boost::multiprecision::denominator(product)));
  }
  return m;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["k"] = c.k ? nlohmann::json(*c.k) : nlohmann::json();
  j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json();
  j["m"] = c.m ? nlohmann::json(*c.m) : nlohmann::json();
  j["alpha"] = c.alpha ? nlohmann::json(to_string(*c.alpha)) : nlohmann::json();
  j["seed"] = c.seed;
  j["eps"] = to_string(c.eps);
  j["delta"] = c.delta;
  j["L"] = c.L;
  j["c0"] = c.c0;
  j["s"] = c.s;
  j["bad_fraction"] = to_string(c.bad_fraction);
  j["bisect"] = c.bisect;
  j["lp"] = c.lp;
  j["caps"] = {{"node", c.node_cap},
               {"component", c.component_cap},
               {"enumeration", c.enumeration_cap},
               {"lp_size", c.lp_size_cap},
               {"marking_retries", c.marking_retries}};
  j["format"] = c.format;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "k") c.k = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      else if (key == "n") c.n = value.is_null() ? std::nullopt : std::optional<Var>(value.get<Var>());
      else if (key == "m") c.m = value.is_null() ? std::nullopt : std::optional<std::size_t>(value.get<std::size_t>());
      else if (key == "alpha")
        c.alpha = value.is_null() ? std::nullopt : std::optional<Rational>(parse_rational(value.get<std::string>()));
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "eps") c.eps = parse_rational(value.get<std::string>());
      else if (key == "delta") c.delta = value.get<std::string>();
      else if (key == "L") c.L = value.get<std::string>();
      else if (key == "c0") c.c0 = value.get<std::size_t>();
      else if (key == "s") c.s = value.get<std::string>();
      else if (key == "bad_fraction") c.bad_fraction = parse_rational(value.get<std::string>());
      else if (key == "bisect") c.bisect = value.get<std::string>();
      else if (key == "lp") c.lp = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "caps") {
        for (const auto& [cap, v] : value.items()) {
          if (cap == "node") c.node_cap = v.get<std::size_t>();
          else if (cap == "component") c.component_cap = v.get<std::size_t>();
          else if (cap == "enumeration") c.enumeration_cap = v.get<std::size_t>();
          else if (cap == "lp_size") c.lp_size_cap = v.get<std::size_t>();
          else if (cap == "marking_retries") c.marking_retries = v.get<std::size_t>();
          else throw Error(ErrorKind::InvalidArgument, "unknown cap '" + cap + "'");
        }
      } else {
        throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  std::string hex;
  char buf[3];
  for (int i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

ResolvedConstants resolve_constants(const RunConfig& config, int k, Var n) {
  ResolvedConstants out;
  out.paper_delta = asymptotic_delta(k);
  if (config.delta == "paper") {
    out.delta = std::max<std::uint32_t>(out.paper_delta, 2);
    if (out.delta != out.paper_delta)
      out.notes.push_back("Delta = ceil(2^{k/300}) = " + std::to_string(out.paper_delta) +
                          " floored to " + std::to_string(out.delta));
  } else if (config.delta == "default") {
    out.delta = default_delta(k);
    if (out.delta != out.paper_delta)
      out.notes.push_back("Delta = ceil(2^{k/300}) = " + std::to_string(out.paper_delta) +
                          " replaced by the default " + std::to_string(out.delta));
  } else {
    out.delta = static_cast<std::uint32_t>(parse_unsigned(config.delta, "Delta"));
  }

  out.paper_L = paper_truncation_depth(k, out.delta, n, config.eps, config.c0);
  if (config.L == "paper") out.L = out.paper_L;
  else if (config.L != "infinite") out.L = static_cast<std::size_t>(parse_unsigned(config.L, "L"));

  out.paper_s = paper_s(k, out.delta);
  if (config.s == "paper") {
    out.s = Rational(out.paper_s);
  } else if (config.s == "paper-capped") {
    out.s = default_s(k, out.delta);
    if (out.paper_s > 1.0) out.notes.push_back("s = " + std::to_string(out.paper_s) + " capped at 1");
  } else {
    out.s = parse_rational(config.s);
  }
  return out;
}

ApproxConfig approx_config(const RunConfig& config, const ResolvedConstants& constants) {
  ApproxConfig a;
  a.eps = config.eps;
  a.delta = constants.delta;
  a.bad_fraction = config.bad_fraction;
  a.seed = config.seed;
  a.marking_retries = config.marking_retries;
  a.search.seed = config.seed;
  a.search.exhaustive_cap = config.component_cap;
  a.component_cap = config.component_cap;
  a.threads = config.threads;
  a.estimate.eps = config.eps;
  a.estimate.s = constants.s;
  a.estimate.bisect = config.bisect == "paper" ? BisectMode::Paper : BisectMode::Geometric;
  a.estimate.solve.mode = config.lp == "float" ? LpMode::Float : LpMode::Exact;
  a.estimate.solve.size_cap = config.lp_size_cap;
  a.estimate.tree.truncation_depth = constants.L;
  a.estimate.tree.node_cap = config.node_cap;
  a.estimate.tree.enumeration_cap = config.enumeration_cap;
  return a;
}

}  // namespace rksat
