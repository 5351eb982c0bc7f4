#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace paperplan {

// Dense row-major tables used for the instance parameters. Index order
// matches the order in which the dimensions are passed to the constructor.

class Array2 {
 public:
  Array2() = default;
  Array2(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  double& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Array2&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

class Array3 {
 public:
  Array3() = default;
  Array3(int d0, int d1, int d2, double fill = 0.0)
      : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0) * d1 * d2, fill) {}

  double& operator()(int a, int b, int c) {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }
  double operator()(int a, int b, int c) const {
    assert(a >= 0 && a < d0_ && b >= 0 && b < d1_ && c >= 0 && c < d2_);
    return data_[(static_cast<std::size_t>(a) * d1_ + b) * d2_ + c];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Array3&) const = default;

 private:
  int d0_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  std::vector<double> data_;
};

}  // namespace paperplan
