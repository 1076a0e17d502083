#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "affsym/calculus.hpp"

namespace affsym::calculus {

// ---------------------------------------------------------------------------
// Layout

namespace {

// Enumerates exponent vectors of exactly `degree` in reverse-lexicographic order.
void enumerate_degree(int nvars, int degree, std::vector<std::uint8_t>& out) {
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      e[static_cast<std::size_t>(var)] = remaining;
      for (int v : e) out.push_back(static_cast<std::uint8_t>(v));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[static_cast<std::size_t>(var)] = k;
      self(self, var + 1, remaining - k);
    }
  };
  rec(rec, 0, degree);
}

}  // namespace

std::uint64_t JetLayout::pack(std::span<const int> multi) {
  std::uint64_t key = 0;
  for (int v : multi) key = (key << 4) | static_cast<std::uint64_t>(v & 0xF);
  return key;
}

std::uint64_t JetLayout::pack(std::span<const std::uint8_t> multi) {
  std::uint64_t key = 0;
  for (auto v : multi) key = (key << 4) | static_cast<std::uint64_t>(v & 0xF);
  return key;
}

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  const auto nv = static_cast<std::size_t>(nvars);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(nvars, d, exponents_);
    degree_end_.push_back(exponents_.size() / nv);
  }
  const std::size_t n = exponents_.size() / nv;
  degrees_.resize(n);
  weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto ex = exponents(i);
    int deg = 0;
    double w = 1.0;
    for (auto v : ex) {
      deg += v;
      for (int k = 2; k <= v; ++k) w *= k;
    }
    degrees_[i] = deg;
    weights_[i] = w;
    lookup_.emplace(pack(ex), static_cast<std::uint32_t>(i));
  }

  std::vector<int> sum(nv);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (degrees_[a] + degrees_[b] > order) continue;
      auto ea = exponents(a);
      auto eb = exponents(b);
      for (std::size_t v = 0; v < nv; ++v) sum[v] = ea[v] + eb[v];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), lookup_.at(pack(sum))});
    }
  }

  if (order >= 1) {
    const std::size_t lower = degree_end_[static_cast<std::size_t>(order - 1)];
    derivative_sources_.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
      auto& src = derivative_sources_[v];
      src.resize(lower);
      for (std::size_t t = 0; t < lower; ++t) {
        auto et = exponents(t);
        for (std::size_t u = 0; u < nv; ++u) sum[u] = et[u] + (u == v ? 1 : 0);
        src[t] = lookup_.at(pack(sum));
      }
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
  if (nvars < 1 || nvars > kMaxJetVariables)
    throw Error(ErrorCode::InvalidArgument, "jet variable count out of range: " + std::to_string(nvars));
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "jet order must be non-negative");
  if (order > kMaxJetOrder)
    throw Error(ErrorCode::OrderExceeded,
                "jet order " + std::to_string(order) + " exceeds the configured maximum " +
                    std::to_string(kMaxJetOrder));
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(nvars, order));
  return slot;
}

std::size_t JetLayout::index_of(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != nvars_)
    throw Error(ErrorCode::InvalidArgument, "multi-index has the wrong number of entries");
  int deg = 0;
  for (int v : multi) {
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative multi-index entry");
    deg += v;
  }
  if (deg > order_)
    throw Error(ErrorCode::InvalidArgument, "multi-index degree exceeds the jet order");
  return lookup_.at(pack(multi));
}

// ---------------------------------------------------------------------------
// Jet

Jet::Jet(std::shared_ptr<const JetLayout> layout, double constant)
    : layout_(std::move(layout)), coeffs_(layout_->size(), 0.0) {
  coeffs_[0] = constant;
}

Jet Jet::constant(int nvars, int order, double c) { return Jet(JetLayout::get(nvars, order), c); }

Jet Jet::variable(int nvars, int order, int var, double at) {
  Jet j(JetLayout::get(nvars, order), at);
  if (var < 0 || var >= nvars) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
  if (order >= 1) j.coeffs_[j.layout_->unit_index(var)] = 1.0;
  return j;
}

double Jet::coeff(std::span<const int> multi) const { return coeffs_[layout_->index_of(multi)]; }

double Jet::partial(std::span<const int> multi) const {
  const std::size_t i = layout_->index_of(multi);
  return coeffs_[i] * layout_->factorial_weight(i);
}

double Jet::gradient(int var) const {
  if (order() < 1) throw Error(ErrorCode::OrderExceeded, "gradient needs a jet of order >= 1");
  return coeffs_[layout_->unit_index(var)];
}

Jet Jet::derivative(int var) const {
  if (order() < 1) throw Error(ErrorCode::OrderExceeded, "cannot differentiate an order-0 jet");
  if (var < 0 || var >= nvars()) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
  Jet out(JetLayout::get(nvars(), order() - 1), 0.0);
  const auto& src = layout_->derivative_sources(var);
  for (std::size_t t = 0; t < src.size(); ++t) {
    const int k = layout_->exponents(src[t])[static_cast<std::size_t>(var)];
    out.coeffs_[t] = k * coeffs_[src[t]];
  }
  return out;
}

Jet Jet::truncated(int new_order) const {
  if (new_order >= order()) return *this;
  Jet out(JetLayout::get(nvars(), new_order), 0.0);
  std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
  return out;
}

namespace {

// Brings two jets to a common (lower) order.
void harmonize(Jet& a, const Jet& b, Jet& b_out, bool& b_copied) {
  if (a.nvars() != b.nvars()) throw Error(ErrorCode::InvalidArgument, "jets with different variable counts");
  b_copied = false;
  if (b.order() < a.order()) a = a.truncated(b.order());
  if (b.order() > a.order()) {
    b_out = b.truncated(a.order());
    b_copied = true;
  }
}

}  // namespace

Jet& Jet::operator+=(const Jet& o) {
  Jet tmp;
  bool copied;
  harmonize(*this, o, tmp, copied);
  const auto& src = copied ? tmp.coeffs_ : o.coeffs_;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += src[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  Jet tmp;
  bool copied;
  harmonize(*this, o, tmp, copied);
  const auto& src = copied ? tmp.coeffs_ : o.coeffs_;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= src[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }
Jet& Jet::operator+=(double c) {
  coeffs_[0] += c;
  return *this;
}
Jet& Jet::operator-=(double c) {
  coeffs_[0] -= c;
  return *this;
}
Jet& Jet::operator*=(double c) {
  for (double& v : coeffs_) v *= c;
  return *this;
}
Jet& Jet::operator/=(double c) {
  if (c == 0) throw DomainError("division of a jet by zero");
  for (double& v : coeffs_) v /= c;
  return *this;
}

Jet operator-(const Jet& a) {
  Jet out = a;
  for (double& v : out.coeffs_) v = -v;
  return out;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars()) throw Error(ErrorCode::InvalidArgument, "jets with different variable counts");
  const Jet& lo = a.order() <= b.order() ? a : b;
  Jet out(lo.layout_, 0.0);
  // Both coefficient vectors share the low-order prefix, so the low layout's table applies.
  const auto& ca = a.coeffs_;
  const auto& cb = b.coeffs_;
  auto& co = out.coeffs_;
  for (const auto& t : lo.layout_->products()) co[t.out] += ca[t.a] * cb[t.b];
  return out;
}

// Horner evaluation of sum_j taylor[j] * (a - a0)^j.
Jet compose_series(const Jet& a, std::span<const double> taylor) {
  Jet delta = a;
  delta.coeffs_[0] = 0.0;
  Jet result(a.layout_, taylor.back());
  for (std::size_t j = taylor.size() - 1; j-- > 0;) {
    result = result * delta;
    result.coeffs_[0] += taylor[j];
  }
  return result;
}

namespace {

std::vector<double> taylor_buffer(const Jet& a) { return std::vector<double>(static_cast<std::size_t>(a.order()) + 1); }

double inv_factorial(int j) {
  double f = 1.0;
  for (int k = 2; k <= j; ++k) f *= k;
  return 1.0 / f;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0) throw DomainError("division by a jet with zero constant term");
  auto t = taylor_buffer(a);
  double p = 1.0 / a0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    t[j] = (j % 2 == 0) ? p : -p;
    p /= a0;
  }
  return compose_series(a, t);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator/(double c, const Jet& a) { return reciprocal(a) *= c; }

Jet exp(const Jet& a) {
  auto t = taylor_buffer(a);
  const double e = std::exp(a.value());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = e * inv_factorial(static_cast<int>(j));
  return compose_series(a, t);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0)) throw DomainError("ln of a non-positive argument");
  auto t = taylor_buffer(a);
  t[0] = std::log(a0);
  double p = 1.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    p /= a0;
    t[j] = ((j % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(j);
  }
  return compose_series(a, t);
}

Jet sin(const Jet& a) {
  auto t = taylor_buffer(a);
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = cycle[j % 4] * inv_factorial(static_cast<int>(j));
  return compose_series(a, t);
}

Jet cos(const Jet& a) {
  auto t = taylor_buffer(a);
  const double s = std::sin(a.value());
  const double c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = cycle[j % 4] * inv_factorial(static_cast<int>(j));
  return compose_series(a, t);
}

Jet tan(const Jet& a) {
  if (std::abs(std::cos(a.value())) < 1e-12) throw DomainError("tan argument at an odd multiple of pi/2");
  return sin(a) / cos(a);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0)) throw DomainError("sqrt of a non-positive argument");
  return pow(a, 0.5);
}

Jet pow(const Jet& a, double exponent) {
  const double a0 = a.value();
  const bool integral = std::floor(exponent) == exponent && std::abs(exponent) < 1e6;
  if (integral && exponent >= 0) {
    // Exact repeated squaring keeps polynomials free of series error and handles a0 <= 0.
    auto n = static_cast<long long>(exponent);
    Jet result(a.layout_ptr(), 1.0);
    Jet base = a;
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }
  if (integral) return pow(reciprocal(a), -exponent);
  if (!(a0 > 0)) throw DomainError("non-integer power of a non-positive argument");
  auto t = taylor_buffer(a);
  double binom = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    t[j] = binom * std::pow(a0, exponent - static_cast<double>(j));
    binom *= (exponent - static_cast<double>(j)) / static_cast<double>(j + 1);
  }
  return compose_series(a, t);
}

double max_abs_difference(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars()) throw Error(ErrorCode::InvalidArgument, "jets with different variable counts");
  const std::size_t n = std::min(a.coefficients().size(), b.coefficients().size());
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a.coefficients()[i] - b.coefficients()[i]));
  return m;
}

}  // namespace affsym::calculus
