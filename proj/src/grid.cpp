#include "capverify/grid.hpp"

#include <algorithm>
#include <cmath>

namespace capverify {

namespace {
// 3-point Gauss-Legendre rule on [-1, 1].
constexpr double kGL3Node = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGL3W0 = 5.0 / 9.0;
constexpr double kGL3W1 = 8.0 / 9.0;
}  // namespace

Grid1D::Grid1D(double a, double b, int panels, bool periodic) : a_(a), b_(b), periodic_(periodic) {
  if (!(b > a)) throw ArgumentError("Grid1D: empty interval");
  if (panels < 1) throw ArgumentError("Grid1D: need at least one panel");
  const double h = (b - a) / panels;
  nodes_.reserve(static_cast<std::size_t>(3 * panels));
  weights_.reserve(static_cast<std::size_t>(3 * panels));
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    const double r = 0.5 * h;
    nodes_.push_back(c - r * kGL3Node);
    nodes_.push_back(c);
    nodes_.push_back(c + r * kGL3Node);
    weights_.push_back(r * kGL3W0);
    weights_.push_back(r * kGL3W1);
    weights_.push_back(r * kGL3W0);
  }

  const int n = size();
  win_len_ = std::min(10, n);
  win_start_.resize(static_cast<std::size_t>(n));
  w_d1_.assign(static_cast<std::size_t>(n) * win_len_, 0.0);
  w_d2_.assign(static_cast<std::size_t>(n) * win_len_, 0.0);
  std::vector<double> pts(static_cast<std::size_t>(win_len_));
  for (int i = 0; i < n; ++i) {
    int s;
    if (periodic_) {
      // centered window, indices taken modulo n with unwrapped coordinates
      s = i - win_len_ / 2;
      for (int j = 0; j < win_len_; ++j) {
        const int raw = s + j;
        const int wrapped = ((raw % n) + n) % n;
        double shift = 0.0;
        if (raw < 0) shift = -(b - a);
        if (raw >= n) shift = (b - a);
        pts[static_cast<std::size_t>(j)] = nodes_[static_cast<std::size_t>(wrapped)] + shift;
      }
      win_start_[static_cast<std::size_t>(i)] = ((s % n) + n) % n;
    } else {
      s = std::clamp(i - win_len_ / 2, 0, n - win_len_);
      win_start_[static_cast<std::size_t>(i)] = s;
      for (int j = 0; j < win_len_; ++j) pts[static_cast<std::size_t>(j)] = nodes_[static_cast<std::size_t>(s + j)];
    }
    Mat w = fornberg_weights(nodes_[static_cast<std::size_t>(i)], pts, 2);
    for (int j = 0; j < win_len_; ++j) {
      w_d1_[static_cast<std::size_t>(i) * win_len_ + j] = w(1, j);
      w_d2_[static_cast<std::size_t>(i) * win_len_ + j] = w(2, j);
    }
  }

  end_len_ = std::min(8, n + 1);
  std::vector<double> epts(static_cast<std::size_t>(end_len_));
  for (int j = 0; j < end_len_ - 1; ++j)
    epts[static_cast<std::size_t>(j)] = nodes_[static_cast<std::size_t>(n - (end_len_ - 1) + j)];
  epts[static_cast<std::size_t>(end_len_ - 1)] = b;
  Mat we = fornberg_weights(b, epts, 2);
  w_end_d1_.resize(static_cast<std::size_t>(end_len_));
  w_end_d2_.resize(static_cast<std::size_t>(end_len_));
  for (int j = 0; j < end_len_; ++j) {
    w_end_d1_[static_cast<std::size_t>(j)] = we(1, j);
    w_end_d2_[static_cast<std::size_t>(j)] = we(2, j);
  }
  // Interpolation to b uses interior nodes only.
  const int ni = std::min(8, n);
  std::vector<double> pts2(static_cast<std::size_t>(ni));
  for (int j = 0; j < ni; ++j) pts2[static_cast<std::size_t>(j)] = nodes_[static_cast<std::size_t>(n - ni + j)];
  Mat wi = fornberg_weights(b, pts2, 0);
  w_end_interp_.resize(static_cast<std::size_t>(ni));
  for (int j = 0; j < ni; ++j) w_end_interp_[static_cast<std::size_t>(j)] = wi(0, j);
}

void Grid1D::differentiate(const double* values, std::ptrdiff_t stride, int order, double* out,
                           std::ptrdiff_t out_stride) const {
  const std::vector<double>& w = (order == 1) ? w_d1_ : w_d2_;
  if (order != 1 && order != 2) throw ArgumentError("Grid1D::differentiate: order must be 1 or 2");
  const int n = size();
  for (int i = 0; i < n; ++i) {
    const int s = win_start_[static_cast<std::size_t>(i)];
    double acc = 0.0;
    if (periodic_) {
      for (int j = 0; j < win_len_; ++j)
        acc += w[static_cast<std::size_t>(i) * win_len_ + j] * values[((s + j) % n) * stride];
    } else {
      for (int j = 0; j < win_len_; ++j)
        acc += w[static_cast<std::size_t>(i) * win_len_ + j] * values[(s + j) * stride];
    }
    out[i * out_stride] = acc;
  }
}

double Grid1D::end_derivative(const double* values, std::ptrdiff_t stride, double value_at_b,
                              int order) const {
  const std::vector<double>& w = (order == 1) ? w_end_d1_ : w_end_d2_;
  const int n = size();
  const int ni = end_len_ - 1;
  double acc = w[static_cast<std::size_t>(ni)] * value_at_b;
  for (int j = 0; j < ni; ++j) acc += w[static_cast<std::size_t>(j)] * values[(n - ni + j) * stride];
  return acc;
}

double Grid1D::end_value(const double* values, std::ptrdiff_t stride) const {
  const int n = size();
  const int ni = int(w_end_interp_.size());
  double acc = 0.0;
  for (int j = 0; j < ni; ++j) acc += w_end_interp_[static_cast<std::size_t>(j)] * values[(n - ni + j) * stride];
  return acc;
}

double Grid1D::weight_magnitude(int node, int order) const {
  const std::vector<double>& w = (order == 1) ? w_d1_ : w_d2_;
  double s = 0.0;
  for (int j = 0; j < win_len_; ++j)
    s += std::abs(w[static_cast<std::size_t>(node) * win_len_ + j]);
  return s;
}

std::vector<double> tensor_differentiate(const TensorShape& shape, const Grid1D* grids,
                                         const std::vector<double>& values, int d, int order) {
  std::vector<double> out(values.size());
  const int stride = shape.stride(d);
  const int nd = shape.size[d];
  const int lines = shape.total() / nd;
  // Enumerate all lines along dimension d.
  for (int line = 0; line < lines; ++line) {
    // decompose `line` into the indices of the other dimensions
    int rem = line;
    int base = 0;
    for (int k = shape.dim - 1; k >= 0; --k) {
      if (k == d) continue;
      const int ik = rem % shape.size[k];
      rem /= shape.size[k];
      base += ik * shape.stride(k);
    }
    grids[d].differentiate(values.data() + base, stride, order, out.data() + base, stride);
  }
  return out;
}

}  // namespace capverify
