#include "cpoly/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace cpoly {

namespace {

// Exact rational value of a double (every finite double is m * 2^e).
void double_to_fraction(double x, int64_t& num, int64_t& den) {
  if (x < 0 || x >= 1.0) throw ConfigError("probability out of range");
  num = 0;
  den = 1;
  // 53 bits of mantissa is enough; scale by 2 until integral.
  double v = x;
  int64_t d = 1;
  for (int i = 0; i < 62 && v != std::floor(v); ++i) {
    v *= 2;
    d *= 2;
  }
  if (v != std::floor(v)) throw ConfigError("hold probability not representable");
  num = static_cast<int64_t>(v);
  den = d;
  int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

bool same_coord(const Coord& a, const Coord& b, int d) {
  for (int i = 0; i < d; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool is_zero(const Coord& a, int d) {
  for (int i = 0; i < d; ++i)
    if (a[i] != 0) return false;
  return true;
}

// Row-echelon integer elimination (gcd pivots). The support generates
// Z^d as a group iff the spanned lattice has full rank and index 1,
// i.e. the product of pivots is +-1.
bool generates_full_lattice(const std::vector<StepEntry>& steps, int d) {
  std::vector<std::array<int64_t, kMaxDim>> basis(d);
  for (auto& row : basis) row.fill(0);
  auto reduce = [&](std::array<int64_t, kMaxDim> v) {
    for (int i = 0; i < d; ++i) {
      if (v[i] == 0) continue;
      if (basis[i][i] == 0) {
        basis[i] = v;
        return;
      }
      // Replace pivot row by the gcd combination, kill v[i].
      int64_t a = basis[i][i], b = v[i];
      int64_t old_r = a, old_s = 1, old_t = 0, r = b, s = 0, t = 1;
      while (r != 0) {
        int64_t q = old_r / r;
        int64_t tmp;
        tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
      }
      // old_r = gcd, old_s*a + old_t*b = gcd
      std::array<int64_t, kMaxDim> newrow{};
      std::array<int64_t, kMaxDim> newv{};
      for (int j = 0; j < kMaxDim; ++j) {
        newrow[j] = old_s * basis[i][j] + old_t * v[j];
        newv[j] = (a / old_r) * v[j] - (b / old_r) * basis[i][j];
      }
      basis[i] = newrow;
      v = newv;
    }
  };
  for (const auto& s : steps) {
    if (is_zero(s.v, d)) continue;
    std::array<int64_t, kMaxDim> v{};
    for (int i = 0; i < d; ++i) v[i] = s.v[i];
    reduce(v);
  }
  int64_t det = 1;
  for (int i = 0; i < d; ++i) {
    if (basis[i][i] == 0) return false;  // rank deficient
    det *= basis[i][i];
  }
  return det == 1 || det == -1;
}

}  // namespace

WalkModel WalkModel::simple(int d) {
  if (d < 1 || d > kMaxDim) throw ConfigError("dimension must be in [1, 8]");
  WalkModel m;
  m.d_ = d;
  m.kind_ = WalkKind::Simple;
  for (int i = 0; i < d; ++i) {
    for (int s : {+1, -1}) {
      StepEntry e;
      e.v[i] = s;
      e.num = 1;
      e.den = 2 * d;
      m.steps_.push_back(e);
    }
  }
  m.validate_and_finalize();
  return m;
}

WalkModel WalkModel::lazy(int d, double hold) {
  if (d < 1 || d > kMaxDim) throw ConfigError("dimension must be in [1, 8]");
  if (!(hold > 0.0 && hold < 1.0)) throw ConfigError("hold probability must be in (0, 1)");
  WalkModel m;
  m.d_ = d;
  m.kind_ = WalkKind::Lazy;
  m.hold_ = hold;
  int64_t hn, hd;
  double_to_fraction(hold, hn, hd);
  StepEntry stay;
  stay.num = hn;
  stay.den = hd;
  m.steps_.push_back(stay);
  // remaining mass (hd - hn)/hd split over the 2d unit steps
  for (int i = 0; i < d; ++i) {
    for (int s : {+1, -1}) {
      StepEntry e;
      e.v[i] = s;
      e.num = hd - hn;
      e.den = hd * 2 * d;
      int64_t g = std::gcd(e.num, e.den);
      e.num /= g;
      e.den /= g;
      m.steps_.push_back(e);
    }
  }
  m.validate_and_finalize();
  return m;
}

WalkModel WalkModel::custom(int d, std::vector<StepEntry> table) {
  if (d < 1 || d > kMaxDim) throw ConfigError("dimension must be in [1, 8]");
  WalkModel m;
  m.d_ = d;
  m.kind_ = WalkKind::Custom;
  m.steps_ = std::move(table);
  m.validate_and_finalize();
  return m;
}

void WalkModel::validate_and_finalize() {
  if (steps_.empty()) throw ConfigError("empty step table");
  for (auto& e : steps_) {
    if (e.num <= 0 || e.den <= 0) throw ConfigError("step probabilities must be positive");
    for (int i = d_; i < kMaxDim; ++i)
      if (e.v[i] != 0) throw ConfigError("step vector exceeds dimension");
    for (int i = 0; i < d_; ++i)
      if (std::llabs(e.v[i]) > 1024) throw ConfigError("step component too large");
    e.p = static_cast<double>(e.num) / static_cast<double>(e.den);
  }
  for (size_t i = 0; i < steps_.size(); ++i)
    for (size_t j = i + 1; j < steps_.size(); ++j)
      if (same_coord(steps_[i].v, steps_[j].v, d_)) throw ConfigError("duplicate step vector");

  Rational total = 0;
  for (const auto& e : steps_) total += Rational(e.num, e.den);
  if (total != 1) throw ConfigError("step probabilities must sum exactly to 1");

  // symmetry: (v, p) in table implies (-v, p) in table
  for (const auto& e : steps_) {
    Coord nv = negate(e.v, d_);
    bool found = false;
    for (const auto& f : steps_) {
      if (same_coord(f.v, nv, d_)) {
        if (Rational(e.num, e.den) != Rational(f.num, f.den))
          throw ConfigError("asymmetric step law: p(v) != p(-v)");
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("asymmetric step law: -v missing from support");
  }

  if (!generates_full_lattice(steps_, d_))
    throw ConfigError("step support does not generate Z^d");

  // covariance Gamma = sum p_v v v^T, exact then rounded
  cov_.assign(static_cast<size_t>(d_) * d_, 0.0);
  for (int a = 0; a < d_; ++a) {
    for (int b = 0; b < d_; ++b) {
      Rational s = 0;
      for (const auto& e : steps_) s += Rational(e.num, e.den) * e.v[a] * e.v[b];
      cov_[static_cast<size_t>(a) * d_ + b] = to_double(s);
    }
  }

  // axis sign-flip invariance (per axis) and axis-permutation invariance
  auto find_prob = [&](const Coord& v) -> const StepEntry* {
    for (const auto& e : steps_)
      if (same_coord(e.v, v, d_)) return &e;
    return nullptr;
  };
  axis_symmetric_ = true;
  for (int a = 0; a < d_ && axis_symmetric_; ++a) {
    for (const auto& e : steps_) {
      Coord w = e.v;
      w[a] = -w[a];
      const StepEntry* f = find_prob(w);
      if (!f || Rational(f->num, f->den) != Rational(e.num, e.den)) {
        axis_symmetric_ = false;
        break;
      }
    }
  }
  perm_symmetric_ = true;
  for (int a = 0; a + 1 < d_ && perm_symmetric_; ++a) {
    for (const auto& e : steps_) {
      Coord w = e.v;
      std::swap(w[a], w[a + 1]);
      const StepEntry* f = find_prob(w);
      if (!f || Rational(f->num, f->den) != Rational(e.num, e.den)) {
        perm_symmetric_ = false;
        break;
      }
    }
  }

  build_alias_table();
}

void WalkModel::build_alias_table() {
  const int k = static_cast<int>(steps_.size());
  alias_prob_.assign(k, 0.0);
  alias_idx_.assign(k, 0);
  std::vector<double> scaled(k);
  for (int i = 0; i < k; ++i) scaled[i] = steps_[i].p * k;
  std::vector<int> small, large;
  for (int i = 0; i < k; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    int s = small.back(), l = large.back();
    small.pop_back();
    large.pop_back();
    alias_prob_[s] = scaled[s];
    alias_idx_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (int i : large) {
    alias_prob_[i] = 1.0;
    alias_idx_[i] = i;
  }
  for (int i : small) {
    alias_prob_[i] = 1.0;
    alias_idx_[i] = i;
  }
}

double WalkModel::char_function(const double* theta) const {
  double s = 0.0;
  for (const auto& e : steps_) {
    double dot = 0.0;
    for (int i = 0; i < d_; ++i) dot += theta[i] * static_cast<double>(e.v[i]);
    s += e.p * std::cos(dot);
  }
  return s;
}

double WalkModel::char_function(const std::vector<double>& theta) const {
  return char_function(theta.data());
}

double WalkModel::det_covariance() const {
  // Gaussian elimination with partial pivoting; d <= 8
  std::vector<double> a = cov_;
  const int d = d_;
  double det = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::fabs(a[r * d + c]) > std::fabs(a[piv * d + c])) piv = r;
    if (piv != c) {
      for (int j = 0; j < d; ++j) std::swap(a[c * d + j], a[piv * d + j]);
      det = -det;
    }
    const double p = a[c * d + c];
    if (p == 0.0) return 0.0;
    det *= p;
    for (int r = c + 1; r < d; ++r) {
      const double f = a[r * d + c] / p;
      for (int j = c; j < d; ++j) a[r * d + j] -= f * a[c * d + j];
    }
  }
  return det;
}

std::vector<double> WalkModel::covariance_inverse() const {
  const int d = d_;
  std::vector<double> a = cov_;
  std::vector<double> inv(static_cast<size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int r = c + 1; r < d; ++r)
      if (std::fabs(a[r * d + c]) > std::fabs(a[piv * d + c])) piv = r;
    if (std::fabs(a[piv * d + c]) < 1e-300) throw ConfigError("singular covariance");
    if (piv != c)
      for (int j = 0; j < d; ++j) {
        std::swap(a[c * d + j], a[piv * d + j]);
        std::swap(inv[c * d + j], inv[piv * d + j]);
      }
    const double p = a[c * d + c];
    for (int j = 0; j < d; ++j) {
      a[c * d + j] /= p;
      inv[c * d + j] /= p;
    }
    for (int r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = a[r * d + c];
      if (f == 0.0) continue;
      for (int j = 0; j < d; ++j) {
        a[r * d + j] -= f * a[c * d + j];
        inv[r * d + j] -= f * inv[c * d + j];
      }
    }
  }
  return inv;
}

double WalkModel::quad_form(const double* theta) const {
  double q = 0.0;
  for (int a = 0; a < d_; ++a)
    for (int b = 0; b < d_; ++b) q += theta[a] * cov_[static_cast<size_t>(a) * d_ + b] * theta[b];
  return q;
}

std::string WalkModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WalkKind::Simple: os << "simple"; break;
    case WalkKind::Lazy: os << "lazy(hold=" << hold_ << ")"; break;
    case WalkKind::Custom: os << "custom(" << steps_.size() << " steps)"; break;
  }
  os << " d=" << d_;
  return os.str();
}

}  // namespace cpoly
