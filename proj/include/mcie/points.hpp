#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcie {

/// Coordinates of one point of T (or of [0,1]^dim).
using Point = std::span<const double>;

/// Non-owning view of a contiguous run of equally sized points.
class PointSpan {
public:
    PointSpan() = default;
    PointSpan(const double* data, std::size_t dim, std::size_t count)
        : data_(data), dim_(dim), count_(count) {}

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    Point operator[](std::size_t i) const { return {data_ + i * dim_, dim_}; }

    PointSpan subspan(std::size_t begin, std::size_t count) const {
        return {data_ + begin * dim_, dim_, count};
    }

private:
    const double* data_ = nullptr;
    std::size_t dim_ = 0;
    std::size_t count_ = 0;
};

/// Owning, row-major point storage.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<double> coords);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const noexcept { return coords_.empty(); }

    Point operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    std::span<double> mutable_point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

    void push_back(Point p);
    void resize(std::size_t count) { coords_.resize(count * dim_); }
    void reserve(std::size_t count) { coords_.reserve(count * dim_); }

    std::span<const double> coords() const noexcept { return coords_; }

    PointSpan view() const { return {coords_.data(), dim_, size()}; }
    PointSpan view(std::size_t begin, std::size_t count) const {
        return {coords_.data() + begin * dim_, dim_, count};
    }
    operator PointSpan() const { return view(); }  // NOLINT(google-explicit-constructor)

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

}  // namespace mcie
