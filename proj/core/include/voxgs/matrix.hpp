#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace voxgs {

// Dense row-major matrix. Rows are anchors, columns are attribute channels.
template<typename T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c)
  {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const
  {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const
  {
    return {data_.data() + r * cols_, cols_};
  }

  // Copies one column out; columns are strided in row-major storage.
  std::vector<T> column(std::size_t c) const
  {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      out[r] = data_[r * cols_ + c];
    return out;
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  void append_row(std::span<const T> values)
  {
    assert(values.size() == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

}  // namespace voxgs
