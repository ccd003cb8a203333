#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stochy {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

struct Entry {
    std::uint32_t col;
    double value;
};

/// Compressed-row matrix of point probabilities.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }
    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
    }
    std::span<const double> row_vals(std::size_t r) const {
        return {val.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
    }
    double row_sum(std::size_t r) const;
    double at(std::size_t r, std::size_t c) const;

    /// Sorts triplets and merges duplicates.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
    /// Rows given as column-sorted entry lists.
    static CsrMatrix from_rows(std::size_t cols, const std::vector<std::vector<Entry>>& rows);
    static CsrMatrix from_dense(const std::vector<std::vector<double>>& dense);

    bool operator==(const CsrMatrix&) const = default;
};

struct IntervalEntry {
    std::uint32_t col;
    double low;
    double high;
};

/// Compressed-row matrix of probability intervals [low, high].
struct IntervalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> low;
    std::vector<double> high;

    std::size_t nnz() const { return col.size(); }
    std::size_t row_begin(std::size_t r) const { return row_ptr[r]; }
    std::size_t row_end(std::size_t r) const { return row_ptr[r + 1]; }
    std::vector<IntervalEntry> row(std::size_t r) const;
    /// Bounds of (r, c), {0, 0} when not stored.
    IntervalEntry at(std::size_t r, std::size_t c) const;

    static IntervalMatrix from_rows(std::size_t cols, const std::vector<std::vector<IntervalEntry>>& rows);
    /// Point matrix seen as degenerate intervals.
    static IntervalMatrix from_points(const CsrMatrix& m);

    bool operator==(const IntervalMatrix&) const = default;
};

} // namespace stochy
