#pragma once

// Shared vocabulary: scalar/matrix types, half-integers, error types,
// compensated summation, operator norms and the deterministic parallel loop.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace ncf {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class invalid_label_error : public error {
 public:
  using error::error;
};

class band_limit_error : public error {
 public:
  using error::error;
};

class grid_mismatch_error : public error {
 public:
  using error::error;
};

class aliasing_error : public error {
 public:
  using error::error;
};

class order_violation_error : public error {
 public:
  using error::error;
};

class singularity_error : public error {
 public:
  using error::error;
};

class budget_error : public error {
 public:
  using error::error;
};

class parse_error : public error {
 public:
  using error::error;
};

// ---------------------------------------------------------------------------
// HalfInt: exact half-integer arithmetic, stored as twice the value.

class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int value) : twice_(2 * value) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  static HalfInt from_double(double v) {
    const double t = 2.0 * v;
    const double r = std::round(t);
    if (!std::isfinite(v) || std::abs(t - r) > 1e-9)
      throw parse_error("not a half-integer: " + std::to_string(v));
    return from_twice(static_cast<int>(r));
  }

  // Accepts "3", "-2", "1/2", "7/2", "0.5".
  static HalfInt parse(std::string_view s) {
    const std::string str(s);
    try {
      if (auto slash = str.find('/'); slash != std::string::npos) {
        const int num = std::stoi(str.substr(0, slash));
        const int den = std::stoi(str.substr(slash + 1));
        if (den == 1) return HalfInt(num);
        if (den != 2) throw parse_error("half-integer denominator must be 2: " + str);
        return from_twice(num);
      }
      std::size_t used = 0;
      const double v = std::stod(str, &used);
      if (used != str.size()) throw parse_error("trailing characters in half-integer: " + str);
      return from_double(v);
    } catch (const std::logic_error&) {
      throw parse_error("cannot parse half-integer: " + str);
    }
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return twice_ / 2.0; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  // floor(value)
  constexpr int floor() const { return twice_ >= 0 ? twice_ / 2 : -((-twice_ + 1) / 2); }

  constexpr auto operator<=>(const HalfInt&) const = default;
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt operator*(int k) const { return from_twice(twice_ * k); }

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

// ---------------------------------------------------------------------------
// Neumaier compensated summation.

class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Operator (spectral) norm: largest singular value, from the largest
// eigenvalue of A*A (Eigen's tridiagonal QR, deterministic). Accurate to
// round-off also when singular values coincide.

inline double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const Matrix b = a / scale;
  const Matrix gram = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// ---------------------------------------------------------------------------
// Threading. NONCOMM_FOURIER_THREADS caps parallelism; every parallel loop
// writes index-addressed results, so output never depends on thread count.

namespace detail {
inline std::atomic<int>& thread_override() {
  static std::atomic<int> v{0};
  return v;
}
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_override() = n; }

inline int thread_count() {
  if (int o = detail::thread_override(); o > 0) return o;
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NONCOMM_FOURIER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = n > 0 ? std::min(n, cap) : cap;
  }
  return std::max(1, n);
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Least-squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw error("line fit needs at least two points");
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < n; ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
  }
  if (sxx.value() == 0.0) throw error("line fit needs at least two distinct abscissae");
  LineFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace ncf
