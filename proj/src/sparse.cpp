#include "stochy/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace stochy {

double CsrMatrix::row_sum(std::size_t r) const {
    double s = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        s += val[k];
    return s;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    const auto cols_r = row_cols(r);
    const auto it = std::lower_bound(cols_r.begin(), cols_r.end(), static_cast<std::uint32_t>(c));
    if (it == cols_r.end() || *it != c)
        return 0.0;
    return val[row_ptr[r] + static_cast<std::size_t>(it - cols_r.begin())];
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        const auto& t = triplets[k];
        if (t.row >= rows || t.col >= cols)
            throw std::out_of_range("triplet outside matrix");
        if (!m.col.empty() && k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
            m.val.back() += t.value;
            continue;
        }
        m.col.push_back(t.col);
        m.val.push_back(t.value);
        ++m.row_ptr[t.row + 1];
    }
    for (std::size_t r = 0; r < rows; ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

CsrMatrix CsrMatrix::from_rows(std::size_t cols, const std::vector<std::vector<Entry>>& rows) {
    CsrMatrix m;
    m.rows = rows.size();
    m.cols = cols;
    std::size_t total = 0;
    for (const auto& r : rows)
        total += r.size();
    m.col.reserve(total);
    m.val.reserve(total);
    m.row_ptr.reserve(rows.size() + 1);
    for (const auto& r : rows) {
        for (const auto& e : r) {
            m.col.push_back(e.col);
            m.val.push_back(e.value);
        }
        m.row_ptr.push_back(m.col.size());
    }
    return m;
}

CsrMatrix CsrMatrix::from_dense(const std::vector<std::vector<double>>& dense) {
    std::vector<std::vector<Entry>> rows(dense.size());
    std::size_t cols = 0;
    for (std::size_t r = 0; r < dense.size(); ++r) {
        cols = std::max(cols, dense[r].size());
        for (std::size_t c = 0; c < dense[r].size(); ++c)
            if (dense[r][c] != 0.0)
                rows[r].push_back({static_cast<std::uint32_t>(c), dense[r][c]});
    }
    return from_rows(cols, rows);
}

std::vector<IntervalEntry> IntervalMatrix::row(std::size_t r) const {
    std::vector<IntervalEntry> out;
    out.reserve(row_end(r) - row_begin(r));
    for (std::size_t k = row_begin(r); k < row_end(r); ++k)
        out.push_back({col[k], low[k], high[k]});
    return out;
}

IntervalEntry IntervalMatrix::at(std::size_t r, std::size_t c) const {
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_begin(r));
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_end(r));
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
    if (it == last || *it != c)
        return {static_cast<std::uint32_t>(c), 0.0, 0.0};
    const auto k = static_cast<std::size_t>(it - col.begin());
    return {col[k], low[k], high[k]};
}

IntervalMatrix IntervalMatrix::from_rows(std::size_t cols, const std::vector<std::vector<IntervalEntry>>& rows) {
    IntervalMatrix m;
    m.rows = rows.size();
    m.cols = cols;
    std::size_t total = 0;
    for (const auto& r : rows)
        total += r.size();
    m.col.reserve(total);
    m.low.reserve(total);
    m.high.reserve(total);
    m.row_ptr.reserve(rows.size() + 1);
    for (const auto& r : rows) {
        for (const auto& e : r) {
            m.col.push_back(e.col);
            m.low.push_back(e.low);
            m.high.push_back(e.high);
        }
        m.row_ptr.push_back(m.col.size());
    }
    return m;
}

IntervalMatrix IntervalMatrix::from_points(const CsrMatrix& p) {
    IntervalMatrix m;
    m.rows = p.rows;
    m.cols = p.cols;
    m.row_ptr = p.row_ptr;
    m.col = p.col;
    m.low = p.val;
    m.high = p.val;
    return m;
}

} // namespace stochy
