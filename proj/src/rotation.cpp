#include "flatcircle/rotation.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <memory>

#include "flatcircle/error.hpp"

namespace flatcircle {

// ---------------------------------------------------------------- fractions

ContinuedFraction ContinuedFraction::from_quotients(std::span<const std::int64_t> quotients) {
  ContinuedFraction cf;
  cf.p = {0};
  cf.q = {1};
  for (auto a : quotients) cf.push(a);
  return cf;
}

std::int64_t ContinuedFraction::quotient(int k) const {
  if (k < 1 || k > depth()) throw DomainError("partial quotient index out of range: " + std::to_string(k));
  return a[static_cast<size_t>(k - 1)];
}

void ContinuedFraction::push(std::int64_t next) {
  if (next < 1) throw DomainError("partial quotients must be positive");
  if (p.empty()) p = {0}, q = {1};
  const size_t k = a.size() + 1;
  const std::int64_t pm2 = k >= 2 ? p[k - 2] : 1;  // p_{-1} = 1
  const std::int64_t qm2 = k >= 2 ? q[k - 2] : 0;  // q_{-1} = 0
  a.push_back(next);
  p.push_back(next * p[k - 1] + pm2);
  q.push_back(next * q[k - 1] + qm2);
}

// ----------------------------------------------------------------- targets

RotationTarget RotationTarget::golden() {
  RotationTarget t = periodic({1});
  t.name_ = "golden";
  return t;
}

RotationTarget RotationTarget::silver() {
  RotationTarget t = periodic({2});
  t.name_ = "silver";
  return t;
}

RotationTarget RotationTarget::periodic(std::vector<std::int64_t> period) {
  if (period.empty()) throw ConfigError("continued fraction period is empty");
  for (auto a : period)
    if (a < 1) throw ConfigError("partial quotients must be positive integers");
  RotationTarget t;
  t.name_ = "cf:";
  for (size_t i = 0; i < period.size(); ++i) t.name_ += (i ? "," : "") + std::to_string(period[i]);
  t.period_ = std::move(period);
  return t;
}

RotationTarget RotationTarget::decimal(std::string_view text) {
  std::string s(text);
  auto dot = s.find('.');
  if (dot == std::string::npos || s.find_first_not_of("0123456789.") != std::string::npos ||
      s.find('.', dot + 1) != std::string::npos)
    throw ConfigError("decimal target must look like 0.ddd: '" + s + "'");
  std::string digits = s.substr(dot + 1);
  if (digits.empty() || s.substr(0, dot).find_first_not_of('0') != std::string::npos)
    throw ConfigError("decimal target must lie in (0, 1): '" + s + "'");
  mpz_class num(digits.c_str(), 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, digits.size());
  if (num == 0) throw ConfigError("decimal target must lie in (0, 1)");

  // Only quotients whose convergent denominators stay below 10^(d/2) are
  // determined by d decimal places.
  mpz_class qlimit;
  mpz_ui_pow_ui(qlimit.get_mpz_t(), 10, digits.size() / 2);
  RotationTarget t;
  t.name_ = "dec:" + s;
  t.decimal_ = true;
  t.decimal_text_ = s;
  mpz_class a_num = den, a_den = num;  // 1/x
  mpz_class qm1 = 0, q0 = 1;
  while (a_den != 0) {
    mpz_class a = a_num / a_den;
    mpz_class q1 = a * q0 + qm1;
    if (q1 > qlimit) break;
    t.decimal_quotients_.push_back(a.get_si());
    qm1 = q0, q0 = q1;
    mpz_class r = a_num - a * a_den;
    a_num = a_den, a_den = r;
  }
  if (t.decimal_quotients_.empty()) throw ConfigError("decimal target has too few digits");
  return t;
}

RotationTarget RotationTarget::parse(std::string_view text) {
  if (text == "golden") return golden();
  if (text == "silver") return silver();
  if (text.starts_with("cf:")) {
    std::vector<std::int64_t> period;
    std::string body(text.substr(3));
    size_t pos = 0;
    while (pos <= body.size()) {
      size_t comma = body.find(',', pos);
      std::string item = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("bad continued fraction list: '" + body + "'");
      period.push_back(std::stoll(item));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return periodic(std::move(period));
  }
  if (text.starts_with("dec:")) return decimal(text.substr(4));
  throw ConfigError("unknown rotation target '" + std::string(text) + "'");
}

ContinuedFraction RotationTarget::expand(std::int64_t max_q) const {
  ContinuedFraction cf = ContinuedFraction::from_quotients({});
  for (size_t k = 0;; ++k) {
    std::int64_t a;
    if (decimal_) {
      if (k >= decimal_quotients_.size()) break;
      a = decimal_quotients_[k];
    } else {
      a = period_[k % period_.size()];
    }
    cf.push(a);
    if (cf.q.back() > max_q) break;
  }
  return cf;
}

Real RotationTarget::value(unsigned bits) const {
  PrecisionScope scope(bits);
  if (decimal_) return Real::parse(decimal_text_, bits);
  // Iterate the periodic tail to a fixed point, then unwind one period.
  Real tail = Real(1);
  for (int it = 0; it < static_cast<int>(bits) + 8; ++it) {
    Real x = tail;
    for (auto i = period_.rbegin(); i != period_.rend(); ++i) x = Real(*i) + Real(1) / x;
    tail = x;
  }
  return Real(1) / tail;
}

// ------------------------------------------------------------- comparisons

const Real& LiftedOrbit::at(std::size_t i) {
  if (x_.empty()) x_.push_back(map_.offset());
  while (x_.size() <= i) x_.push_back(map_.lift(x_.back()));
  return x_[i];
}

namespace {

Real comparison_tolerance(unsigned bits) { return Real::pow2(-static_cast<long>(bits) + 32, bits); }

// -1, +1 or 0 when |v| is within tolerance.
int sign_with_tol(const Real& v, const Real& eps) {
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

}  // namespace

Comparison compare_rho_rational(LiftedOrbit& orbit, std::int64_t p, std::int64_t q) {
  if (q < 1) throw DomainError("denominator must be positive");
  const FlatMap& m = orbit.map();
  const Real eps = comparison_tolerance(m.precision());
  const Real pr(p);
  bool pos = false, neg = false, small = false;
  auto account = [&](const Real& g) {
    int s = sign_with_tol(g, eps);
    if (s > 0) pos = true;
    else if (s < 0) neg = true;
    else small = true;
  };
  const auto uq = static_cast<std::size_t>(q);
  for (std::size_t i = 0; i <= uq; ++i) {
    account(orbit.at(i + uq) - orbit.at(i) - pr);
    if (pos && neg) return Comparison::straddles;
  }
  // F^q(0) = F^(q-1)(omega), the image of the whole plateau.
  account(orbit.at(uq - 1) - pr);
  account(orbit.at(uq - 1) - m.flat_length() - pr);
  if (pos && neg) return Comparison::straddles;
  if (!small) return pos ? Comparison::greater : Comparison::less;

  // Inconclusive: refine once on a uniform mesh.
  const std::int64_t mesh = 4 * (q + 3);
  for (std::int64_t j = 0; j < mesh; ++j) {
    Real x = Real(j) / Real(mesh);
    Real y = x;
    for (std::int64_t k = 0; k < q; ++k) y = m.lift(y);
    int s = sign_with_tol(y - x - pr, eps);
    if (s > 0) pos = true;
    if (s < 0) neg = true;
    if (pos && neg) return Comparison::straddles;
  }
  return Comparison::straddles;
}

Comparison compare_rho_rational(const FlatMap& m, std::int64_t p, std::int64_t q) {
  LiftedOrbit orbit(m);
  return compare_rho_rational(orbit, p, q);
}

ContinuedFraction rotation_number(const FlatMap& m, int depth, std::int64_t max_quotient) {
  LiftedOrbit orbit(m);
  ContinuedFraction cf = ContinuedFraction::from_quotients({});
  std::int64_t pm1 = 1, qm1 = 0;  // c_{-1} = 1/0
  for (int k = 0; k < depth; ++k) {
    const std::int64_t pk = cf.p.back(), qk = cf.q.back();
    std::int64_t a = 1;
    for (;; ++a) {
      if (a > max_quotient) throw DomainError("partial quotient exceeds limit; rotation number looks rational");
      const std::int64_t cp = a * pk + pm1, cq = a * qk + qm1;
      // The candidate lies on the c_{k-1} side of c_k; rho beyond it means a_{k+1} > a.
      const bool ck_above = pk * cq > cp * qk;
      Comparison c = compare_rho_rational(orbit, cp, cq);
      if (c == Comparison::straddles)
        throw DomainError("rotation number equals " + std::to_string(cp) + "/" + std::to_string(cq));
      const bool beyond = ck_above ? c == Comparison::greater : c == Comparison::less;
      if (!beyond) break;
    }
    if (a - 1 < 1) throw InconsistencyError("continued fraction walk lost the rotation number");
    pm1 = pk, qm1 = qk;
    cf.push(a - 1);
  }
  return cf;
}

// ------------------------------------------------------------------ tuning

namespace {

struct Probe {
  std::unique_ptr<FlatMap> map;
  std::unique_ptr<LiftedOrbit> orbit;
  Probe(const Real& u, const Real& l, const Real& w)
      : map(std::make_unique<FlatMap>(u, l, w)), orbit(std::make_unique<LiftedOrbit>(*map)) {}
};

// The target lies above even convergents and below odd ones.
Comparison target_side(int k) { return k % 2 == 0 ? Comparison::greater : Comparison::less; }

int agreeing_prefix(LiftedOrbit& orbit, const ContinuedFraction& cf) {
  int k = 1;
  for (; k <= cf.depth(); ++k)
    if (compare_rho_rational(orbit, cf.p[k], cf.q[k]) != target_side(k)) break;
  return k - 1;
}

}  // namespace

TuneResult tune_offset(const Real& flat_length, const Real& exponent, const RotationTarget& target,
                       const TuneOptions& opts) {
  const unsigned bits = default_precision();
  if (opts.tol_bits + 16 > bits)
    throw DomainError("tolerance of " + std::to_string(opts.tol_bits) + " bits needs more working precision");
  ContinuedFraction conv = target.expand(opts.max_q);
  while (conv.depth() > 1 && conv.q.back() > opts.max_q) {
    conv.a.pop_back(), conv.p.pop_back(), conv.q.pop_back();
  }
  const int K = conv.depth();

  Real omega;
  int steps = 0;
  bool resolved = false;
  FlatMap probe_check(flat_length, exponent, Real(0));
  if (probe_check.is_rigid()) {
    omega = target.value(bits);
  } else {
    std::unique_ptr<Probe> lo, hi;  // null while at the initial bracket ends 0 and 1
    Real a(0), b(1);
    const Real tol = Real::pow2(-static_cast<long>(opts.tol_bits), bits);
    while (b - a > tol) {
      ++steps;
      Real mid = (a + b) / Real(2);
      auto probe = std::make_unique<Probe>(flat_length, exponent, mid);
      int deciding = 0;
      bool below = false;
      for (int k = 1; k <= K; ++k) {
        Comparison c = compare_rho_rational(*probe->orbit, conv.p[k], conv.q[k]);
        if (c == target_side(k)) continue;
        deciding = k;
        // A straddle means rho(mid) = c_k, which sits on the known side of the target.
        below = c == Comparison::straddles ? (k % 2 == 0) : c == Comparison::less;
        break;
      }
      if (deciding == 0) {
        resolved = true;
        omega = mid;
        break;
      }
      if (opts.check_monotone) {
        // The opposite bracket end must sit beyond the same convergent.
        Probe* other = below ? hi.get() : lo.get();
        if (other) {
          Comparison c = compare_rho_rational(*other->orbit, conv.p[deciding], conv.q[deciding]);
          Comparison want = below ? Comparison::greater : Comparison::less;
          if (c != want && c != Comparison::straddles)
            throw InconsistencyError("rotation number is not monotone in the offset near " + mid.str(30));
        }
      }
      if (below) {
        a = mid;
        lo = std::move(probe);
      } else {
        b = mid;
        hi = std::move(probe);
      }
    }
    if (!resolved) omega = (a + b) / Real(2);
  }

  FlatMap m(flat_length, exponent, omega);
  LiftedOrbit orbit(m);
  const int agreed = agreeing_prefix(orbit, conv);
  if (agreed == K) resolved = true;
  const int depth = std::max(0, agreed - 1);
  if (depth < opts.min_depth)
    throw PrecisionExhausted("tuning certified only " + std::to_string(depth) + " partial quotients, " +
                             std::to_string(opts.min_depth) + " requested");
  std::vector<std::int64_t> quotients(conv.a.begin(), conv.a.begin() + depth);
  ContinuedFraction cf = ContinuedFraction::from_quotients(quotients);
  ContinuedFraction walked = rotation_number(m, depth);
  if (walked.a != cf.a) throw InconsistencyError("tuned map's expansion differs from the target");
  return TuneResult{std::move(m), std::move(cf), depth, steps, resolved};
}

// ---------------------------------------------------------------- orbits

std::vector<std::int64_t> closest_return_times(const FlatMap& m, const CirclePoint& x0, std::int64_t horizon) {
  std::vector<std::int64_t> times;
  CirclePoint x = x0;
  Real best(2);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    x = m.forward(x);
    Real d = circle_dist(x, x0);
    if (d < best) {
      best = d;
      times.push_back(t);
    }
  }
  return times;
}

OrderCheck order_isomorphism_check(const FlatMap& m, const Real& rho, std::int64_t count) {
  std::map<Real, std::int64_t> orbit, model;
  CirclePoint x(m.offset());
  OrderCheck out;
  auto predecessor = [](std::map<Real, std::int64_t>& s, const Real& key, bool& tie) -> std::int64_t {
    auto it = s.lower_bound(key);
    if (it != s.end() && it->first == key) tie = true;
    if (it == s.begin()) it = s.end();
    return std::prev(it)->second;
  };
  for (std::int64_t i = 0; i < count; ++i) {
    Real y = frac(Real(i + 1) * rho);
    if (i > 0) {
      bool tie = false;
      std::int64_t a = predecessor(orbit, x.pos(), tie);
      std::int64_t b = predecessor(model, y, tie);
      if (tie || a != b) {
        out.pass = false;
        out.first_mismatch = i;
        return out;
      }
    }
    orbit.emplace(x.pos(), i);
    model.emplace(y, i);
    x = m.forward(x);
  }
  return out;
}

}  // namespace flatcircle
