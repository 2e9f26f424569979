#include "flatcircle/flatcircle.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "flatcircle/error.hpp"
#include "flatcircle/partition.hpp"
#include "flatcircle/rotation.hpp"
#include "flatcircle/runner.hpp"

using namespace flatcircle;

struct fc_map {
  unsigned bits;
  std::optional<FlatMap> map;
  std::optional<ContinuedFraction> cf;  // set for tuned maps
};

struct fc_partition {
  DynamicalPartition part;
};

namespace {

thread_local std::string last_error;

fc_status fail(fc_status s, const std::string& what) {
  last_error = what;
  return s;
}

fc_status from_kind(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain:
    case ErrorKind::config: return FC_CONFIG_ERROR;
    case ErrorKind::precision: return FC_PRECISION_EXHAUSTED;
    case ErrorKind::inconsistency: return FC_INVARIANT_FAILED;
    case ErrorKind::io: return FC_ERROR;
  }
  return FC_ERROR;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
fc_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(from_kind(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FC_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(FC_ERROR, e.what());
  }
}

bool bad_bits(unsigned bits) { return bits < 64 || bits > (1u << 20); }

}  // namespace

extern "C" {

const char* fc_version(void) { return "0.1.0"; }

const char* fc_last_error(void) { return last_error.c_str(); }

void fc_string_free(char* s) { std::free(s); }

fc_status fc_map_create(const char* flat_length, const char* exponent, const char* offset, unsigned precision_bits,
                        fc_map** out) {
  if (!flat_length || !exponent || !offset || !out) return fail(FC_CONFIG_ERROR, "null argument");
  if (bad_bits(precision_bits)) return fail(FC_CONFIG_ERROR, "precision_bits must lie in [64, 2^20]");
  return guarded([&] {
    PrecisionScope scope(precision_bits);
    auto m = std::make_unique<fc_map>();
    m->bits = precision_bits;
    m->map.emplace(Real::parse(flat_length), Real::parse(exponent), Real::parse(offset));
    *out = m.release();
    return FC_OK;
  });
}

fc_status fc_map_tune(const char* flat_length, const char* exponent, const char* target, unsigned precision_bits,
                      fc_map** out) {
  if (!flat_length || !exponent || !target || !out) return fail(FC_CONFIG_ERROR, "null argument");
  if (bad_bits(precision_bits)) return fail(FC_CONFIG_ERROR, "precision_bits must lie in [64, 2^20]");
  return guarded([&] {
    PrecisionScope scope(precision_bits);
    TuneOptions opts;
    opts.tol_bits = std::min(opts.tol_bits, precision_bits - 32);
    TuneResult t = tune_offset(Real::parse(flat_length), Real::parse(exponent), RotationTarget::parse(target), opts);
    auto m = std::make_unique<fc_map>();
    m->bits = precision_bits;
    m->map.emplace(std::move(t.map));
    m->cf.emplace(std::move(t.cf));
    *out = m.release();
    return FC_OK;
  });
}

void fc_map_destroy(fc_map* m) { delete m; }

fc_status fc_map_forward(const fc_map* m, const char* x, char** out) {
  if (!m || !x || !out) return fail(FC_CONFIG_ERROR, "null argument");
  return guarded([&] {
    PrecisionScope scope(m->bits);
    *out = dup(m->map->forward(CirclePoint(Real::parse(x))).pos().str());
    return *out ? FC_OK : fail(FC_ERROR, "out of memory");
  });
}

fc_status fc_map_omega(const fc_map* m, char** out) {
  if (!m || !out) return fail(FC_CONFIG_ERROR, "null argument");
  return guarded([&] {
    *out = dup(m->map->offset().str());
    return *out ? FC_OK : fail(FC_ERROR, "out of memory");
  });
}

fc_status fc_map_partial_quotients(const fc_map* m, int64_t* buf, size_t cap, size_t* count) {
  if (!m || !count || (cap && !buf)) return fail(FC_CONFIG_ERROR, "null argument");
  if (!m->cf) return fail(FC_CONFIG_ERROR, "map was not tuned");
  last_error.clear();
  const auto& a = m->cf->a;
  for (size_t i = 0; i < a.size() && i < cap; ++i) buf[i] = a[i];
  *count = a.size();
  return FC_OK;
}

fc_status fc_partition_build(const fc_map* m, int level, fc_partition** out) {
  if (!m || !out) return fail(FC_CONFIG_ERROR, "null argument");
  if (!m->cf) return fail(FC_CONFIG_ERROR, "map was not tuned");
  if (level < 1) return fail(FC_CONFIG_ERROR, "level must be at least 1");
  return guarded([&] {
    PrecisionScope scope(m->bits);
    if (level + 1 > m->cf->depth())
      throw PrecisionExhausted("level " + std::to_string(level) + " needs " + std::to_string(level + 1) +
                               " certified partial quotients, have " + std::to_string(m->cf->depth()));
    const auto& q = m->cf->q;
    PreimageSet pre(*m->map, q[static_cast<size_t>(level)] + q[static_cast<size_t>(level) + 1]);
    auto p = std::make_unique<fc_partition>(fc_partition{build_partition(*m->map, pre, *m->cf, level)});
    *out = p.release();
    return FC_OK;
  });
}

void fc_partition_destroy(fc_partition* p) { delete p; }

fc_status fc_partition_counts(const fc_partition* p, size_t* long_gaps, size_t* short_gaps, size_t* preimages) {
  if (!p) return fail(FC_CONFIG_ERROR, "null argument");
  last_error.clear();
  if (long_gaps) *long_gaps = p->part.long_count();
  if (short_gaps) *short_gaps = p->part.short_count();
  if (preimages) *preimages = p->part.elements.size() - p->part.long_count() - p->part.short_count();
  return FC_OK;
}

fc_status fc_partition_csv(const fc_partition* p, char** out) {
  if (!p || !out) return fail(FC_CONFIG_ERROR, "null argument");
  return guarded([&] {
    *out = dup(p->part.to_csv());
    return *out ? FC_OK : fail(FC_ERROR, "out of memory");
  });
}

fc_status fc_run(const char* command, const char* config_json, char** summary) {
  if (!command) return fail(FC_CONFIG_ERROR, "null command");
  if (summary) *summary = nullptr;
  return guarded([&] {
    RunConfig cfg = RunConfig::from_json(config_json && *config_json ? config_json : "{}");
    cfg.command = command;
    RunResult r = run(cfg);
    if (summary) *summary = dup(r.summary);
    if (r.status != RunStatus::ok) {
      const auto pos = r.summary.find("ERROR ");
      last_error = pos != std::string::npos ? r.summary.substr(pos + 6, r.summary.find('\n', pos) - pos - 6)
                                            : "one or more invariants failed";
    }
    return static_cast<fc_status>(static_cast<int>(r.status));
  });
}

}  // extern "C"
