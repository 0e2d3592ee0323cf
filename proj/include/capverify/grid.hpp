#pragma once

#include <vector>

#include "capverify/linalg.hpp"

namespace capverify {

// Composite Gauss-Legendre rule on [a, b]: `panels` equal cells with a
// 3-point rule each, plus local polynomial differentiation stencils on the
// resulting node set. Nodes never touch the interval ends, so coordinate
// singularities at domain edges stay out of the node set.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double a, double b, int panels, bool periodic = false);

  double a() const { return a_; }
  double b() const { return b_; }
  int size() const { return int(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  // Derivative of sampled values at every node (order 1 or 2).
  void differentiate(const double* values, std::ptrdiff_t stride, int order, double* out,
                     std::ptrdiff_t out_stride) const;

  // One-sided derivative at the upper end b from the last interior values
  // plus the value at b itself (passed separately).
  double end_derivative(const double* values, std::ptrdiff_t stride, double value_at_b,
                        int order = 1) const;

  // Interpolation of interior samples to the upper end b.
  double end_value(const double* values, std::ptrdiff_t stride) const;

  // Sum of stencil weight magnitudes at a node; an a-priori scale for the
  // roundoff noise a derivative of that order can carry.
  double weight_magnitude(int node, int order) const;

 private:
  double a_ = 0.0, b_ = 1.0;
  bool periodic_ = false;
  std::vector<double> nodes_, weights_;
  // per-node stencil: window start and weight rows for d1 and d2; periodic
  // grids wrap the window around the seam (indices modulo the node count)
  std::vector<int> win_start_;
  int win_len_ = 0;
  std::vector<double> w_d1_, w_d2_;  // size() * win_len_
  // end-of-interval stencils (last `end_len_-1` interior nodes + b)
  int end_len_ = 0;
  std::vector<double> w_end_d1_, w_end_d2_, w_end_interp_;
};

// Dense tensor-product index helper over up to 3 dimensions.
struct TensorShape {
  int dim = 0;
  int size[3] = {1, 1, 1};

  int total() const {
    int t = 1;
    for (int d = 0; d < dim; ++d) t *= size[d];
    return t;
  }
  int index(const int* i) const {
    int idx = 0;
    for (int d = 0; d < dim; ++d) idx = idx * size[d] + i[d];
    return idx;
  }
  int stride(int d) const {
    int s = 1;
    for (int k = d + 1; k < dim; ++k) s *= size[k];
    return s;
  }
};

// Apply the 1-D differentiation along dimension `d` of a tensor field.
std::vector<double> tensor_differentiate(const TensorShape& shape, const Grid1D* grids,
                                         const std::vector<double>& values, int d, int order);

}  // namespace capverify
