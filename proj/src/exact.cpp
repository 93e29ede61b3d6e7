#include "cpoly/exact.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cpoly::exact {

namespace {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ConfigError("expected a finite value");
  // every finite double is an exact dyadic rational
  int exp = 0;
  double mant = std::frexp(x, &exp);
  for (int i = 0; i < 64 && mant != std::floor(mant); ++i) {
    mant *= 2;
    --exp;
  }
  Rational r(BigInt(static_cast<long long>(mant)));
  if (exp > 0)
    r *= Rational(pow_big(2, exp));
  else if (exp < 0)
    r /= Rational(pow_big(2, -exp));
  return r;
}

// Enumeration state for one path prefix.
struct PathState {
  Coord pos{};
  std::vector<Coord> site_coord;     // append-only per branch
  std::vector<int> site_count;      // parallel to site_coord
  std::vector<int> seq;             // site index occupied at time k (1-based -> seq[k-1])
  std::vector<bool> appended;       // whether level k appended a new site
  int sup = 0;
  Rational prob = 1;

  explicit PathState(int n) {
    site_coord.reserve(n);
    site_count.reserve(n);
    seq.assign(n, -1);
    appended.assign(n, false);
  }
};

struct StepDown {
  int site_idx;
  int old_sup;
};

// push the position reached after one step; returns what undo() needs
template <class State>
StepDown push_site(State& st, int level, const Coord& pos, int d) {
  int idx = -1;
  for (size_t i = 0; i < st.site_coord.size(); ++i) {
    bool eq = true;
    for (int a = 0; a < d; ++a)
      if (st.site_coord[i][a] != pos[a]) {
        eq = false;
        break;
      }
    if (eq) {
      idx = static_cast<int>(i);
      break;
    }
  }
  StepDown down{idx, st.sup};
  if (idx < 0) {
    st.site_coord.push_back(pos);
    st.site_count.push_back(0);
    idx = static_cast<int>(st.site_coord.size()) - 1;
    down.site_idx = idx;
    st.appended[level] = true;
  } else {
    st.appended[level] = false;
  }
  st.site_count[idx] += 1;
  st.sup = std::max(st.sup, st.site_count[idx]);
  st.seq[level] = idx;
  return down;
}

template <class State>
void pop_site(State& st, int level, const StepDown& down) {
  st.site_count[down.site_idx] -= 1;
  if (st.appended[level]) {
    st.site_coord.pop_back();
    st.site_count.pop_back();
  }
  st.sup = down.old_sup;
}

// Tables shared by every leaf of one enumeration.
struct MomentTables {
  int max_m;
  // factor[l][i] = site_moment(l, i) / (2^i i!)
  std::vector<std::vector<Rational>> factor;
  std::vector<Rational> m_factorial;

  MomentTables(int n, int max_m_) : max_m(max_m_) {
    factor.assign(n + 1, {});
    for (int l = 0; l <= n; ++l) {
      factor[l].assign(max_m + 1, Rational(0));
      factor[l][0] = 1;
      for (int i = 1; i <= max_m; ++i)
        factor[l][i] = site_moment(l, i) / Rational(pow_big(2, i) * factorial_big(i));
    }
    m_factorial.assign(max_m + 1, Rational(1));
    for (int i = 1; i <= max_m; ++i) m_factorial[i] = m_factorial[i - 1] * i;
  }
};

struct SummaryAccum {
  std::vector<Rational> energy, self, energy_trunc, self_trunc, a_sum;
  Rational total_prob = 0;
  uint64_t paths = 0;

  explicit SummaryAccum(int max_m) {
    energy.assign(max_m + 1, Rational(0));
    self = energy;
    energy_trunc = energy;
    self_trunc = energy;
    a_sum = energy;
  }

  void merge(const SummaryAccum& o) {
    for (size_t i = 0; i < energy.size(); ++i) {
      energy[i] += o.energy[i];
      self[i] += o.self[i];
      energy_trunc[i] += o.energy_trunc[i];
      self_trunc[i] += o.self_trunc[i];
      a_sum[i] += o.a_sum[i];
    }
    total_prob += o.total_prob;
    paths += o.paths;
  }
};

void leaf_contributions(const PathState& st, const MomentTables& tab, double K,
                        SummaryAccum& acc) {
  const int max_m = tab.max_m;
  const bool kept = static_cast<double>(st.sup) <= K;
  acc.total_prob += st.prob;
  acc.paths += 1;

  // Q = sum over sites of C(l, 2)
  int64_t q = 0;
  for (int c : st.site_count) q += static_cast<int64_t>(c) * (c - 1) / 2;
  BigInt qpow = 1;
  for (int m = 0; m <= max_m; ++m) {
    Rational term = st.prob * Rational(qpow);
    acc.self[m] += term;
    if (kept) acc.self_trunc[m] += term;
    qpow *= q;
  }

  // truncated series product over sites: coefficient m times m! is the
  // charge average of H^m for this path
  std::vector<Rational> poly(max_m + 1, Rational(0));
  poly[0] = 1;
  for (int c : st.site_count) {
    if (c < 2) continue;  // singly visited sites contribute factor 1
    const auto& f = tab.factor[c];
    for (int i = max_m; i >= 1; --i) {
      Rational s = poly[i];  // j = 0 term
      for (int j = 1; j <= i; ++j)
        if (!poly[i - j].is_zero() && !f[j].is_zero()) s += poly[i - j] * f[j];
      poly[i] = s;
    }
  }
  for (int m = 0; m <= max_m; ++m) {
    if (poly[m].is_zero()) continue;
    Rational moment = tab.m_factorial[m] * poly[m] * st.prob;
    acc.energy[m] += moment;
    if (kept) acc.energy_trunc[m] += moment;
  }

  // distinct-site sums: ordered distinct m-tuples of sites weighted by
  // prod l(l-1) equal m! times the elementary symmetric functions of
  // a_y = l(y)(l(y)-1)
  if (kept) {
    std::vector<BigInt> e(max_m + 1, BigInt(0));
    e[0] = 1;
    int top = 0;
    for (int c : st.site_count) {
      if (c < 2) continue;
      const int64_t a = static_cast<int64_t>(c) * (c - 1);
      top = std::min(max_m, top + 1);
      for (int j = top; j >= 1; --j) e[j] += a * e[j - 1];
    }
    for (int m = 0; m <= max_m; ++m) {
      if (e[m] == 0) continue;
      acc.a_sum[m] += st.prob * tab.m_factorial[m] * Rational(e[m], pow_big(2, m));
    }
  }
}

// depth-first over all step choices from `level` to n
template <class LeafFn>
void dfs(const WalkModel& model, PathState& st, int level, int n, LeafFn&& leaf) {
  if (level == n) {
    leaf(st);
    return;
  }
  const int d = model.dim();
  for (const auto& e : model.steps()) {
    Coord next = st.pos;
    add_in_place(next, e.v, d);
    Coord saved = st.pos;
    Rational saved_prob = st.prob;
    st.pos = next;
    st.prob *= Rational(e.num, e.den);
    StepDown down = push_site(st, level, next, d);
    dfs(model, st, level + 1, n, leaf);
    pop_site(st, level, down);
    st.pos = saved;
    st.prob = saved_prob;
  }
}

// collect all prefix states at a fixed depth (for parallel subtrees)
void collect_prefixes(const WalkModel& model, PathState& st, int level, int depth, int n,
                      std::vector<PathState>& out) {
  if (level == depth) {
    out.push_back(st);
    return;
  }
  const int d = model.dim();
  for (const auto& e : model.steps()) {
    Coord next = st.pos;
    add_in_place(next, e.v, d);
    Coord saved = st.pos;
    Rational saved_prob = st.prob;
    st.pos = next;
    st.prob *= Rational(e.num, e.den);
    StepDown down = push_site(st, level, next, d);
    collect_prefixes(model, st, level + 1, depth, n, out);
    pop_site(st, level, down);
    st.pos = saved;
    st.prob = saved_prob;
  }
}

}  // namespace

Rational site_moment(int l, int i) {
  if (i == 0) return 1;
  if (l < 2) return 0;
  // E[((2k - l)^2 - l)^i] with k ~ Binomial(l, 1/2)
  BigInt num = 0;
  for (int k = 0; k <= l; ++k) {
    BigInt v = BigInt(2 * k - l) * (2 * k - l) - l;
    num += binomial_big(l, k) * pow_big(v, i);
  }
  return Rational(num, pow_big(2, l));
}

Rational pair_sum_moment(int n, int i) { return site_moment(n, i); }

Rational pair_sum_abs_moment(int n, int i) {
  if (i == 0) return 1;
  if (n < 1) return 0;
  BigInt num = 0;
  for (int k = 0; k <= n; ++k) {
    BigInt v = BigInt(2 * k - n) * (2 * k - n) - n;
    if (v < 0) v = -v;
    num += binomial_big(n, k) * pow_big(v, i);
  }
  return Rational(num, pow_big(2, n));
}

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::Energy: return "H";
    case Quantity::Self: return "Q";
    case Quantity::EnergyTruncated: return "Htrunc";
    case Quantity::SelfTruncated: return "Qtrunc";
  }
  return "?";
}

Quantity quantity_from_name(const std::string& s) {
  if (s == "H") return Quantity::Energy;
  if (s == "Q") return Quantity::Self;
  if (s == "Htrunc" || s == "Ht") return Quantity::EnergyTruncated;
  if (s == "Qtrunc" || s == "Qt") return Quantity::SelfTruncated;
  throw ConfigError("unknown quantity '" + s + "' (expected H, Q, Htrunc, Qtrunc)");
}

void ensure_enumerable(const WalkModel& model, int n, bool with_charge_enumeration) {
  if (n < 1) throw ConfigError("n must be >= 1");
  const double s = static_cast<double>(model.steps().size());
  const double paths = std::pow(s, n);
  const double budget = with_charge_enumeration ? paths * std::pow(2.0, n) : paths;
  const double limit = with_charge_enumeration ? 1e8 : 3e7;
  if (budget > limit)
    throw SizeLimitError("enumeration of " + std::to_string(n) + " steps over " +
                         std::to_string(model.steps().size()) +
                         " step choices exceeds the practical bound");
}

ExactSummary enumerate_summary(const WalkModel& model, int n, int max_m, double K,
                               bool parallel) {
  ensure_enumerable(model, n, false);
  if (max_m < 0) throw ConfigError("max_m must be >= 0");
  MomentTables tab(n, max_m);

  SummaryAccum total(max_m);
  const int s = static_cast<int>(model.steps().size());
  int depth = 0;
  {
    long prefixes = 1;
    while (depth < n && prefixes < 64) {
      prefixes *= s;
      ++depth;
    }
  }

  bool use_parallel = parallel && n > depth;
#ifdef _OPENMP
  use_parallel = use_parallel && omp_get_max_threads() > 1;
#else
  use_parallel = false;
#endif

  if (!use_parallel) {
    PathState st(n);
    dfs(model, st, 0, n, [&](const PathState& leaf) { leaf_contributions(leaf, tab, K, total); });
  } else {
    PathState root(n);
    std::vector<PathState> prefixes;
    collect_prefixes(model, root, 0, depth, n, prefixes);
    std::vector<SummaryAccum> parts(prefixes.size(), SummaryAccum(max_m));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < prefixes.size(); ++i) {
      PathState st = prefixes[i];
      dfs(model, st, depth, n,
          [&](const PathState& leaf) { leaf_contributions(leaf, tab, K, parts[i]); });
    }
    // exact rational addition: merge order cannot change the result,
    // keep it indexed anyway
    for (const auto& p : parts) total.merge(p);
  }

  ExactSummary out;
  out.n = n;
  out.max_m = max_m;
  out.K = K;
  out.path_count = total.paths;
  out.total_probability = total.total_prob;
  out.energy = std::move(total.energy);
  out.self = std::move(total.self);
  out.energy_trunc = std::move(total.energy_trunc);
  out.self_trunc = std::move(total.self_trunc);
  out.distinct_site_sum = std::move(total.a_sum);
  return out;
}

Rational exact_moment(const WalkModel& model, Quantity q, int n, int m, double K) {
  const bool truncated = q == Quantity::EnergyTruncated || q == Quantity::SelfTruncated;
  if (truncated && !std::isfinite(K))
    throw ConfigError("truncated quantities require a finite K");
  ExactSummary s = enumerate_summary(model, n, m, K);
  switch (q) {
    case Quantity::Energy: return s.energy[m];
    case Quantity::Self: return s.self[m];
    case Quantity::EnergyTruncated: return s.energy_trunc[m];
    case Quantity::SelfTruncated: return s.self_trunc[m];
  }
  return 0;
}

Rational exact_distinct_site_sum(const WalkModel& model, int n, int m, double K) {
  return enumerate_summary(model, n, m, K).distinct_site_sum[m];
}

MomentReport moment_report(const WalkModel& model, Quantity q, int n, int m, double K) {
  MomentReport r;
  r.quantity = quantity_name(q);
  r.n = n;
  r.m = m;
  r.K = K;
  r.value = exact_moment(model, q, n, m, K);
  return r;
}

nlohmann::json MomentReport::to_json() const {
  nlohmann::json j;
  j["quantity"] = quantity;
  j["n"] = n;
  j["m"] = m;
  if (std::isfinite(K))
    j["K"] = K;
  else
    j["K"] = "inf";
  j["num"] = numerator(value).str();
  j["den"] = denominator(value).str();
  return j;
}

Rational energy_moment_for_counts(const std::vector<int>& counts, int m) {
  int n = 0;
  for (int c : counts) n += c;
  MomentTables tab(n, m);
  std::vector<Rational> poly(m + 1, Rational(0));
  poly[0] = 1;
  for (int c : counts) {
    if (c < 2) continue;
    for (int i = m; i >= 1; --i) {
      Rational s = poly[i];
      for (int j = 1; j <= i; ++j) s += poly[i - j] * tab.factor[c][j];
      poly[i] = s;
    }
  }
  return tab.m_factorial[m] * poly[m];
}

PairSumMomentCheck check_pair_sum_moments(int n, int m) {
  if (n < 1 || m < 2) throw ConfigError("need n >= 1 and m >= 2");
  PairSumMomentCheck out;
  out.n = n;
  out.m = m;
  out.second_moment = pair_sum_moment(n, 2);
  out.identity_value = Rational(2LL * n * (n - 1));
  out.identity_ok = out.second_moment == out.identity_value;
  if (n >= 2) {
    // minimal C with E|Lambda|^m <= m! (C n(n-1))^{m/2}
    const double lhs = to_double(pair_sum_abs_moment(n, m));
    const double mfact = to_double(Rational(factorial_big(m)));
    out.c_min = std::pow(lhs / mfact, 2.0 / m) / (static_cast<double>(n) * (n - 1));
  } else {
    out.c_min = 0.0;
  }
  return out;
}

double fitted_pair_sum_constant(int n_max, int m_max) {
  double c = 1.0;
  for (int n = 2; n <= n_max; ++n)
    for (int m = 2; m <= m_max; ++m) c = std::max(c, check_pair_sum_moments(n, m).c_min);
  return c;
}

MomentComparisonCheck check_moment_comparison(const WalkModel& model, int n, int m, double K) {
  if (m < 1) throw ConfigError("m must be >= 1");
  MomentComparisonCheck out;
  out.n = n;
  out.m = m;
  out.K = K;
  out.fitted_c = fitted_pair_sum_constant(n, std::max(2, m));

  ExactSummary s = enumerate_summary(model, n, 2 * m, K);
  out.a_m = s.distinct_site_sum[m];

  out.a_le_self_lhs = out.a_m;
  out.a_le_self_rhs = s.self_trunc[m];
  out.a_le_self_ok = out.a_le_self_lhs <= out.a_le_self_rhs;

  // E[Ht^{2m}] >= (2m)! / (2^{2m} m!) * A_m
  out.lower_lhs = s.energy_trunc[2 * m];
  out.lower_rhs = Rational(factorial_big(2 * m), pow_big(2, 2 * m) * factorial_big(m)) * out.a_m;
  out.lower_ok = out.lower_lhs >= out.lower_rhs;

  // E[Qt^m] <= sum_{l=1}^m binom(m,l) (l K^2 / 2)^{m-l} A_l
  out.self_upper_lhs = s.self_trunc[m];
  if (!std::isfinite(K) && m > 1) {
    out.self_upper_vacuous = true;  // unbounded right side
    out.self_upper_ok = true;
  } else if (!std::isfinite(K)) {  // m == 1: only the l = m term survives
    out.self_upper_rhs = s.distinct_site_sum[1];
    out.self_upper_ok = out.self_upper_lhs <= out.self_upper_rhs;
  } else {
    Rational k2 = rational_from_double(K) * rational_from_double(K);
    Rational rhs = 0;
    for (int l = 1; l <= m; ++l)
      rhs += Rational(binomial_big(m, l)) * pow_rat(Rational(l) * k2 / 2, m - l) *
             s.distinct_site_sum[l];
    out.self_upper_rhs = rhs;
    out.self_upper_ok = out.self_upper_lhs <= out.self_upper_rhs;
  }

  // E[Ht^m] <= m!/2^m sum_{l=1}^{floor(m/2)} 1/l! K^{m-2l} 2^l C^{(m-2l)/2}
  //            binom(m-l-1, m-2l) E[Qt^l]
  if (!std::isfinite(K) && m != 1) {
    out.upper_vacuous = true;
    out.upper_ok = true;
  } else {
    out.upper_lhs = to_double(s.energy_trunc[m]);
    double rhs = 0.0;
    const double mfact = to_double(Rational(factorial_big(m)));
    for (int l = 1; l <= m / 2; ++l) {
      const double term = mfact / std::pow(2.0, m) / to_double(Rational(factorial_big(l))) *
                          std::pow(std::isfinite(K) ? K : 0.0, m - 2 * l) *
                          std::pow(2.0, l) * std::pow(out.fitted_c, 0.5 * (m - 2 * l)) *
                          to_double(Rational(binomial_big(m - l - 1, m - 2 * l))) *
                          to_double(s.self_trunc[l]);
      rhs += term;
    }
    out.upper_rhs = rhs;
    out.upper_ok = out.upper_lhs <= rhs * (1.0 + 1e-12) + 1e-300;
  }
  return out;
}

nlohmann::json MomentComparisonCheck::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["m"] = m;
  j["K"] = std::isfinite(K) ? nlohmann::json(K) : nlohmann::json("inf");
  j["fitted_c"] = fitted_c;
  j["a_m"] = to_double(a_m);
  j["a_le_self"] = a_le_self_ok;
  j["lower"] = lower_ok;
  j["self_upper"] = self_upper_ok;
  j["self_upper_vacuous"] = self_upper_vacuous;
  j["upper"] = upper_ok;
  j["upper_vacuous"] = upper_vacuous;
  j["pass"] = pass();
  return j;
}

MaximalInequalityCheck check_maximal_inequality(const WalkModel& model, int n, double s,
                                                double t) {
  ensure_enumerable(model, n, true);
  if (n < 2) throw ConfigError("need n >= 2");
  MaximalInequalityCheck out;
  out.n = n;
  out.s = s;
  out.t = t;

  std::vector<Rational> p_small(n, Rational(0));  // per k: P{|H_k| <= s}
  Rational p_max_exceed = 0;
  Rational p_tail = 0;

  PathState st(n);
  const uint64_t masks = 1ull << n;
  std::vector<int64_t> cs;  // per-site running charge sums
  dfs(model, st, 0, n, [&](const PathState& leaf) {
    std::vector<uint64_t> cnt_small(n, 0);
    uint64_t cnt_exceed = 0, cnt_tail = 0;
    cs.assign(leaf.site_coord.size(), 0);
    for (uint64_t mask = 0; mask < masks; ++mask) {
      std::fill(cs.begin(), cs.end(), 0);
      int64_t h = 0;
      double max_abs = 0.0;
      for (int k = 0; k < n; ++k) {
        const int idx = leaf.seq[k];
        const int64_t w = (mask >> k) & 1 ? 1 : -1;
        h += w * cs[idx];
        cs[idx] += w;
        const double a = std::fabs(static_cast<double>(h));
        if (a <= s) cnt_small[k] += 1;
        max_abs = std::max(max_abs, a);
      }
      if (max_abs >= s + t) cnt_exceed += 1;
      if (std::fabs(static_cast<double>(h)) >= t) cnt_tail += 1;
    }
    const Rational w = leaf.prob / Rational(pow_big(2, n));
    for (int k = 0; k < n; ++k) p_small[k] += w * cnt_small[k];
    p_max_exceed += w * cnt_exceed;
    p_tail += w * cnt_tail;
  });

  out.min_small = p_small[0];
  for (int k = 1; k < n; ++k) out.min_small = std::min(out.min_small, p_small[k]);
  out.max_exceed = p_max_exceed;
  out.tail = p_tail;
  out.lhs = out.min_small * out.max_exceed;
  out.rhs = 2 * out.tail;
  out.ok = out.lhs <= out.rhs;
  return out;
}

nlohmann::json MaximalInequalityCheck::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["s"] = s;
  j["t"] = t;
  j["lhs"] = to_double(lhs);
  j["rhs"] = to_double(rhs);
  j["ok"] = ok;
  return j;
}

}  // namespace cpoly::exact
