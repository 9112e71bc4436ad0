#pragma once

// Truncated multivariate Taylor polynomials in the three Cartesian offsets
// (dx, dy, dz), used to obtain exact field derivatives by the product and
// chain rules. Jet<N> keeps all monomials of total degree <= N.

#include <array>
#include <complex>
#include <cstddef>

namespace tl {

namespace jet_detail {

struct Monomial {
  int x = 0, y = 0, z = 0;
  constexpr int degree() const { return x + y + z; }
};

constexpr int jet_size(int n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

template <int N>
constexpr std::array<Monomial, jet_size(N)> monomials() {
  std::array<Monomial, jet_size(N)> m{};
  int k = 0;
  for (int d = 0; d <= N; ++d)
    for (int a = d; a >= 0; --a)
      for (int b = d - a; b >= 0; --b) m[k++] = Monomial{a, b, d - a - b};
  return m;
}

template <int N>
constexpr int index_of(int a, int b, int c) {
  constexpr auto m = monomials<N>();
  for (int k = 0; k < jet_size(N); ++k)
    if (m[k].x == a && m[k].y == b && m[k].z == c) return k;
  return -1;
}

struct ProductTerm {
  unsigned char lhs, rhs, out;
};

template <int N>
constexpr int product_count() {
  constexpr auto m = monomials<N>();
  int count = 0;
  for (int i = 0; i < jet_size(N); ++i)
    for (int j = 0; j < jet_size(N); ++j)
      if (m[i].degree() + m[j].degree() <= N) ++count;
  return count;
}

template <int N>
constexpr std::array<ProductTerm, product_count<N>()> product_table() {
  constexpr auto m = monomials<N>();
  std::array<ProductTerm, product_count<N>()> t{};
  int k = 0;
  for (int i = 0; i < jet_size(N); ++i)
    for (int j = 0; j < jet_size(N); ++j)
      if (m[i].degree() + m[j].degree() <= N)
        t[k++] = ProductTerm{static_cast<unsigned char>(i), static_cast<unsigned char>(j),
                             static_cast<unsigned char>(index_of<N>(m[i].x + m[j].x, m[i].y + m[j].y,
                                                                    m[i].z + m[j].z))};
  return t;
}

// For each axis and each monomial of Jet<N-1>: index in Jet<N> of the monomial
// raised by one power of that axis.
template <int N>
constexpr std::array<std::array<int, jet_size(N - 1)>, 3> raise_table() {
  constexpr auto m = monomials<N - 1>();
  std::array<std::array<int, jet_size(N - 1)>, 3> t{};
  for (int k = 0; k < jet_size(N - 1); ++k) {
    t[0][k] = index_of<N>(m[k].x + 1, m[k].y, m[k].z);
    t[1][k] = index_of<N>(m[k].x, m[k].y + 1, m[k].z);
    t[2][k] = index_of<N>(m[k].x, m[k].y, m[k].z + 1);
  }
  return t;
}

inline std::complex<double> mul(std::complex<double> a, std::complex<double> b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

} // namespace jet_detail

template <int N>
class Jet {
public:
  using Complex = std::complex<double>;
  static constexpr int order = N;
  static constexpr int size = jet_detail::jet_size(N);

  Jet() = default;
  Jet(double v) { c_[0] = v; }
  Jet(Complex v) { c_[0] = v; }

  /// The coordinate `axis` expanded around `value`: value + d_axis.
  static Jet variable(int axis, double value) {
    Jet j(value);
    if constexpr (N >= 1) j.c_[1 + axis] = 1.0;
    return j;
  }

  Complex value() const { return c_[0]; }
  Complex& operator[](int k) { return c_[k]; }
  const Complex& operator[](int k) const { return c_[k]; }

  /// Taylor coefficient of dx^a dy^b dz^c.
  Complex coefficient(int a, int b, int c) const { return c_[jet_detail::index_of<N>(a, b, c)]; }

  /// Partial derivative d^(a+b+c) / dx^a dy^b dz^c at the expansion point.
  Complex partial(int a, int b, int c) const {
    constexpr int fact[] = {1, 1, 2, 6, 24, 120};
    return coefficient(a, b, c) * static_cast<double>(fact[a] * fact[b] * fact[c]);
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < size; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(Complex s) {
    for (auto& v : c_) v = jet_detail::mul(v, s);
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(Complex s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    static constexpr auto table = jet_detail::product_table<N>();
    Jet r;
    for (const auto& t : table) r.c_[t.out] += jet_detail::mul(a.c_[t.lhs], b.c_[t.rhs]);
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += Complex(s); }
  friend Jet operator+(double s, Jet a) { return a += Complex(s); }
  friend Jet operator-(Jet a, double s) { return a += Complex(-s); }
  friend Jet operator-(double s, Jet a) { return (-a) += Complex(s); }
  friend Jet operator+(Jet a, Complex s) { return a += s; }
  friend Jet operator+(Complex s, Jet a) { return a += s; }

private:
  std::array<Complex, size> c_{};
};

/// Applies a univariate function given its derivatives g(a0), g'(a0), ... at
/// the constant term: sum_k g^(k)(a0)/k! * h^k with h = a - a0.
template <int N>
Jet<N> compose(const Jet<N>& a, const std::array<std::complex<double>, N + 1>& derivatives) {
  Jet<N> h = a;
  h[0] = 0.0;
  constexpr double inv_fact[] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0};
  Jet<N> r(derivatives[N] * inv_fact[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * h;
    r[0] += derivatives[k] * inv_fact[k];
  }
  return r;
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  std::array<std::complex<double>, N + 1> d;
  d.fill(std::exp(a.value()));
  return compose(a, d);
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  std::array<std::complex<double>, N + 1> d;
  const std::complex<double> inv = 1.0 / a.value();
  std::complex<double> term = inv;
  for (int k = 0; k <= N; ++k) {
    d[k] = term;
    term *= -(k + 1.0) * inv;
  }
  return compose(a, d);
}

/// Principal square root; derivatives of x^(1/2) by the falling power rule.
template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  std::array<std::complex<double>, N + 1> d;
  const std::complex<double> x = a.value();
  const std::complex<double> root = std::sqrt(x);
  std::complex<double> term = root;
  double exponent = 0.5;
  for (int k = 0; k <= N; ++k) {
    d[k] = term;
    term *= exponent / x;
    exponent -= 1.0;
  }
  return compose(a, d);
}

template <int N>
Jet<N> real_part(const Jet<N>& a) {
  Jet<N> r;
  for (int k = 0; k < Jet<N>::size; ++k) r[k] = a[k].real();
  return r;
}

template <int N>
Jet<N> conj(const Jet<N>& a) {
  Jet<N> r;
  for (int k = 0; k < Jet<N>::size; ++k) r[k] = std::conj(a[k]);
  return r;
}

template <int N>
Jet<N> pow(const Jet<N>& a, int n) {
  Jet<N> r(1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

/// d/d(axis) of a jet, losing one order.
template <int N>
Jet<N - 1> differentiate(const Jet<N>& a, int axis) {
  static_assert(N >= 1);
  static constexpr auto m = jet_detail::monomials<N - 1>();
  static constexpr auto raise = jet_detail::raise_table<N>();
  Jet<N - 1> r;
  for (int k = 0; k < Jet<N - 1>::size; ++k) {
    const int power = axis == 0 ? m[k].x : axis == 1 ? m[k].y : m[k].z;
    r[k] = a[raise[axis][k]] * static_cast<double>(power + 1);
  }
  return r;
}

/// Drops all monomials of degree > M.
template <int M, int N>
Jet<M> truncate(const Jet<N>& a) {
  static_assert(M <= N);
  Jet<M> r;
  for (int k = 0; k < Jet<M>::size; ++k) r[k] = a[k];
  return r;
}

} // namespace tl
